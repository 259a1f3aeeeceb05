"""Run configuration: defaults < KEY=VALUE config file < command-line flags."""
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values

import config
from errors import ConfigurationError
from precision_encoder import PrecisionVector, parse_precision
from qubo_solver import AnnealConfig

MODELS = ("regression", "svm", "kmeans")
SOLVERS = ("exact", "anneal")


def _to_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ConfigurationError(f"cannot interpret {value!r} as a boolean")


def _split_precision(value: Any) -> Tuple[str, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(str(v).strip() for v in value)
    return tuple(part.strip() for part in str(value).split(",") if part.strip())


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one formulate/solve/verify run."""

    model: str
    data: str
    precision: Tuple[str, ...] = tuple(config.QUBO_DEFAULT_PRECISION.split(","))
    k: Optional[int] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    solver: str = "exact"
    sweeps: int = config.QUBO_ANNEAL_SWEEPS
    restarts: int = config.QUBO_ANNEAL_RESTARTS
    t_hi: Optional[float] = None
    t_lo: float = config.QUBO_ANNEAL_T_LO
    seed: int = config.QUBO_ANNEAL_SEED
    out: Optional[str] = None
    verify: bool = False
    exact_max_variables: int = config.QUBO_EXACT_MAX_VARIABLES
    workers: int = config.QUBO_SOLVER_WORKERS

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigurationError(f"model must be one of {MODELS}, got {self.model!r}")
        if not self.data:
            raise ConfigurationError("a data path is required")
        if self.solver not in SOLVERS:
            raise ConfigurationError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.model in ("regression", "svm"):
            p = parse_precision(list(self.precision))
            if self.model == "svm" and p.k_plus is None:
                raise ConfigurationError(
                    f"svm needs a positive precision entry for the multipliers, got {list(self.precision)}"
                )
        if self.model == "kmeans":
            if self.k is None:
                raise ConfigurationError("kmeans needs k (--k)")
            if self.k < 2:
                raise ConfigurationError(f"k must be at least 2, got {self.k}")
            for name in ("alpha", "beta"):
                value = getattr(self, name)
                if value is not None and value < 0:
                    raise ConfigurationError(f"{name} must be >= 0, got {value}")
        if self.exact_max_variables < 1:
            raise ConfigurationError("exact_max_variables must be positive")
        self.anneal_config()

    @property
    def precision_vector(self) -> PrecisionVector:
        return parse_precision(list(self.precision))

    def anneal_config(self) -> AnnealConfig:
        return AnnealConfig(
            sweeps=self.sweeps,
            restarts=self.restarts,
            t_hi=self.t_hi,
            t_lo=self.t_lo,
            seed=self.seed,
            workers=self.workers,
        )

    def to_dict(self) -> Dict[str, Any]:
        doc = asdict(self)
        doc["precision"] = list(self.precision)
        return doc

    @classmethod
    def from_sources(
        cls, file_path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None
    ) -> "RunConfig":
        """
        Merge a config file and explicit overrides into a RunConfig.

        Args:
            file_path: Optional KEY=VALUE file (keys are case-insensitive)
            overrides: Values from command-line flags; None entries are ignored

        Returns:
            Validated RunConfig
        """
        raw: Dict[str, Any] = {}
        if file_path:
            if not os.path.isfile(file_path):
                raise ConfigurationError(f"config file not found: {file_path}")
            for key, value in dotenv_values(file_path).items():
                if value is not None:
                    raw[key.strip().lower().replace("-", "_")] = value
        for key, value in (overrides or {}).items():
            if value is not None:
                raw[key] = value

        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(raw) - set(known))
        if unknown:
            raise ConfigurationError(f"unknown configuration keys: {unknown}")
        for required in ("model", "data"):
            if required not in raw:
                raise ConfigurationError(f"missing required setting {required!r}")

        converters = {
            "precision": _split_precision,
            "k": int,
            "alpha": float,
            "beta": float,
            "sweeps": int,
            "restarts": int,
            "t_hi": float,
            "t_lo": float,
            "seed": int,
            "verify": _to_bool,
            "exact_max_variables": int,
            "workers": int,
        }
        values: Dict[str, Any] = {}
        for key, value in raw.items():
            convert = converters.get(key, str)
            try:
                values[key] = convert(value)
            except (TypeError, ValueError):
                raise ConfigurationError(f"invalid value {value!r} for {key!r}")
        return cls(**values)
