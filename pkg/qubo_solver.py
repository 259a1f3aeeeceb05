"""Exact-enumeration and simulated-annealing backends for QuboInstance."""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import (
    QUBO_ANNEAL_RESTARTS,
    QUBO_ANNEAL_SEED,
    QUBO_ANNEAL_SWEEPS,
    QUBO_ANNEAL_T_LO,
    QUBO_EXACT_MAX_VARIABLES,
    QUBO_OPTIMA_TOLERANCE,
    QUBO_SOLVER_WORKERS,
)
from errors import ConfigurationError, SolverRefusalError
from qubo import QuboInstance, bits_to_list, evaluate, evaluate_many, index_to_bits

logger = logging.getLogger(__name__)

CHUNK_BITS = 16


@dataclass(frozen=True)
class SolverReport:
    """Outcome of a solver run."""

    solver: str
    best: List[int]
    energy: float
    wall_time: float
    all_optima: Optional[List[List[int]]] = None
    sweeps: Optional[int] = None
    restarts: Optional[int] = None
    seed: Optional[int] = None
    evaluated: int = 0
    restart_energies: Optional[List[float]] = None

    def to_dict(self) -> Dict:
        return {
            "solver": self.solver,
            "best": list(self.best),
            "energy": self.energy,
            "energy_hex": float(self.energy).hex(),
            "all_optima": self.all_optima,
            "sweeps": self.sweeps,
            "restarts": self.restarts,
            "seed": self.seed,
            "evaluated": self.evaluated,
            "restart_energies": self.restart_energies,
            "wall_time": self.wall_time,
        }


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing schedule: geometric temperature ladder, sweeps and restarts."""

    sweeps: int = QUBO_ANNEAL_SWEEPS
    restarts: int = QUBO_ANNEAL_RESTARTS
    t_hi: Optional[float] = None
    t_lo: float = QUBO_ANNEAL_T_LO
    seed: int = QUBO_ANNEAL_SEED
    include_zero_start: bool = True
    workers: int = 1

    def __post_init__(self):
        if int(self.sweeps) <= 0:
            raise ConfigurationError(f"sweeps must be positive, got {self.sweeps}")
        if int(self.restarts) <= 0:
            raise ConfigurationError(f"restarts must be positive, got {self.restarts}")
        if not self.t_lo > 0:
            raise ConfigurationError(f"t_lo must be positive, got {self.t_lo}")
        if self.t_hi is not None and not self.t_hi > self.t_lo:
            raise ConfigurationError(
                f"temperature ladder must be strictly decreasing: t_hi={self.t_hi} <= t_lo={self.t_lo}"
            )
        if int(self.workers) <= 0:
            raise ConfigurationError(f"workers must be positive, got {self.workers}")

    def temperatures(self, q: QuboInstance) -> np.ndarray:
        """
        Geometric ladder from t_hi down to t_lo, one temperature per sweep.

        Without an explicit t_hi the ladder starts at max|A_ij| * M.
        """
        t_hi = self.t_hi
        if t_hi is None:
            t_hi = max(float(np.max(np.abs(q.a))) * q.m, self.t_lo * 10.0)
        if self.sweeps == 1:
            return np.array([t_hi])
        return np.geomspace(t_hi, self.t_lo, self.sweeps)


class ExactSolver:
    """Brute-force minimizer over all 2^M assignments."""

    def __init__(
        self,
        max_variables: int = QUBO_EXACT_MAX_VARIABLES,
        tolerance: float = QUBO_OPTIMA_TOLERANCE,
        workers: int = QUBO_SOLVER_WORKERS,
    ):
        self.max_variables = max_variables
        self.tolerance = tolerance
        self.workers = max(1, int(workers))

    def _scan_chunk(self, q: QuboInstance, start: int, stop: int) -> Tuple[float, np.ndarray, np.ndarray]:
        indices = np.arange(start, stop, dtype=np.int64)
        energies = evaluate_many(q, index_to_bits(indices, q.m))
        chunk_min = float(energies.min())
        keep = energies <= chunk_min + self.tolerance
        return chunk_min, indices[keep], energies[keep]

    def solve(self, q: QuboInstance) -> SolverReport:
        """
        Enumerate every assignment and collect all optima.

        Args:
            q: QUBO instance with at most max_variables variables

        Returns:
            SolverReport with all optima in lexicographic order
        """
        if q.m > self.max_variables:
            raise SolverRefusalError(
                f"exact solver is capped at {self.max_variables} variables but the "
                f"instance has {q.m}; use the anneal solver instead (--solver anneal)"
            )
        started = time.perf_counter()
        total = 1 << q.m
        chunk = 1 << min(q.m, CHUNK_BITS)
        bounds = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
        logger.debug("Exact enumeration of %d assignments in %d partitions", total, len(bounds))

        if self.workers > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                parts = list(pool.map(lambda se: self._scan_chunk(q, *se), bounds))
        else:
            parts = [self._scan_chunk(q, start, stop) for start, stop in bounds]

        # partition order is index order, so concatenation stays lexicographic
        global_min = min(p[0] for p in parts)
        optima_idx = np.concatenate([p[1][p[2] <= global_min + self.tolerance] for p in parts])
        optima = index_to_bits(optima_idx, q.m)
        best = optima[0]

        return SolverReport(
            solver="exact",
            best=bits_to_list(best),
            energy=evaluate(q, best),
            all_optima=[bits_to_list(row) for row in optima],
            evaluated=total,
            wall_time=time.perf_counter() - started,
        )


class AnnealSolver:
    """Single-bit-flip Metropolis annealer with restarts."""

    def __init__(self, config: Optional[AnnealConfig] = None):
        self.config = config or AnnealConfig()

    def _run_restart(
        self, q: QuboInstance, temps: np.ndarray, seed_seq: np.random.SeedSequence, zero_start: bool
    ) -> np.ndarray:
        rng = np.random.default_rng(seed_seq)
        m = q.m
        a = q.a
        diag = [float(v) for v in np.diag(a)]
        lin = [float(v) for v in q.b]

        z = np.zeros(m, dtype=np.int8) if zero_start else rng.integers(0, 2, size=m).astype(np.int8)
        h = a @ z.astype(float)
        energy = float(z @ h + z @ q.b)
        best_z, best_e = z.copy(), energy

        def delta(i: int) -> float:
            zi = int(z[i])
            return (1 - 2 * zi) * (diag[i] + lin[i] + 2.0 * (float(h[i]) - diag[i] * zi))

        def flip(i: int):
            s = 1 - 2 * int(z[i])
            z[i] ^= 1
            h[:] += s * a[:, i]

        for t in temps:
            uniforms = rng.random(m)
            for i in range(m):
                d = delta(i)
                if d <= 0.0 or uniforms[i] < math.exp(-d / t):
                    flip(i)
                    energy += d
                    if energy < best_e:
                        best_z, best_e = z.copy(), energy

        # zero-temperature descent from the best state seen
        z[:] = best_z
        h[:] = a @ z.astype(float)
        improved = True
        while improved:
            improved = False
            for i in range(m):
                if delta(i) < -1e-12:
                    flip(i)
                    improved = True
        return z.copy()

    def solve(self, q: QuboInstance) -> SolverReport:
        """
        Anneal from all-zeros and random starts and keep the best restart.

        Args:
            q: QUBO instance

        Returns:
            SolverReport; identical for identical (instance, config)
        """
        cfg = self.config
        started = time.perf_counter()
        temps = cfg.temperatures(q)
        children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
        jobs = [(children[r], cfg.include_zero_start and r == 0) for r in range(cfg.restarts)]
        logger.debug(
            "Annealing M=%d: %d restarts x %d sweeps, T %.3g -> %.3g",
            q.m, cfg.restarts, cfg.sweeps, temps[0], temps[-1],
        )

        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                finals = list(pool.map(lambda job: self._run_restart(q, temps, *job), jobs))
        else:
            finals = [self._run_restart(q, temps, *job) for job in jobs]

        energies = [evaluate(q, z) for z in finals]
        # strict < keeps the lowest restart index on ties
        best_r = 0
        for r, e in enumerate(energies):
            if e < energies[best_r]:
                best_r = r

        return SolverReport(
            solver="anneal",
            best=bits_to_list(finals[best_r]),
            energy=energies[best_r],
            sweeps=cfg.sweeps,
            restarts=cfg.restarts,
            seed=cfg.seed,
            evaluated=cfg.restarts * cfg.sweeps * q.m,
            restart_energies=energies,
            wall_time=time.perf_counter() - started,
        )


def solve_exact(q: QuboInstance, max_variables: int = QUBO_EXACT_MAX_VARIABLES) -> SolverReport:
    return ExactSolver(max_variables=max_variables).solve(q)


def solve_anneal(q: QuboInstance, schedule: Optional[AnnealConfig] = None) -> SolverReport:
    return AnnealSolver(schedule).solve(q)
