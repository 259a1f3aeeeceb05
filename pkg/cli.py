"""Command-line front end: formulate, solve, verify and audit."""
import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

import jsonschema

import config
from complexity_audit import (
    audit_construction_scaling,
    audit_variable_counts,
    default_count_sweep,
    write_records_csv,
    write_summary_json,
)
from errors import ConfigurationError, QuboTrainerError, VerificationFailure
from pipeline import TrainingPipeline
from run_config import MODELS, SOLVERS, RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0

RUN_FLAGS = (
    "model", "data", "precision", "k", "alpha", "beta", "solver", "sweeps", "restarts",
    "t_hi", "t_lo", "seed", "out", "exact_max_variables", "workers",
)


def load_schema(name: str) -> Dict[str, Any]:
    with open(os.path.join(config.SCHEMA_DIR, f"{name}.schema.json"), "r", encoding="utf-8") as fh:
        return json.load(fh)


def validate_document(doc: Dict[str, Any], schema_name: str):
    """Raise if doc does not match the shipped schema."""
    try:
        jsonschema.validate(doc, load_schema(schema_name))
    except jsonschema.ValidationError as e:
        raise QuboTrainerError(f"{schema_name} document failed schema validation: {e.message}")


def _write_json(doc: Dict[str, Any], path: Optional[str]):
    text = json.dumps(doc, indent=2)
    if path:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        logger.info("Wrote %s", path)
    else:
        sys.stdout.write(text + "\n")


def sidecar_path(out: str) -> str:
    return os.path.splitext(out)[0] + ".meta.json"


def cmd_formulate(run_config: RunConfig) -> Dict[str, Any]:
    """
    Write the QUBO instance and its ordering-legend sidecar.

    Args:
        run_config: Validated run configuration; `out` is the QUBO file path

    Returns:
        The sidecar metadata document
    """
    if not run_config.out:
        raise ConfigurationError("formulate needs --out for the QUBO file")
    formulation = TrainingPipeline(run_config).formulate()
    instance = formulation.qubo.to_dict()
    metadata = formulation.metadata()
    validate_document(instance, "qubo_instance")
    validate_document(metadata, "qubo_metadata")
    _write_json(instance, run_config.out)
    _write_json(metadata, sidecar_path(run_config.out))
    return metadata


def cmd_solve(run_config: RunConfig) -> Dict[str, Any]:
    report = TrainingPipeline(run_config).run("solve", verify=run_config.verify)
    validate_document(report, "run_report")
    _write_json(report, run_config.out)
    return report


def cmd_verify(run_config: RunConfig) -> Dict[str, Any]:
    """
    Solve, then compare with the model's oracle.

    Writes the report first; a failed comparison raises VerificationFailure.
    """
    report = TrainingPipeline(run_config).run("verify", verify=True)
    validate_document(report, "run_report")
    _write_json(report, run_config.out)
    verification = report["verification"]
    if verification["status"] == "failed":
        raise VerificationFailure(
            f"{run_config.model} verification failed (gap={verification['gap']})"
        )
    if verification["status"] == "unverified":
        logger.warning("Verification skipped: %s", verification.get("reason"))
    return report


def cmd_audit(out_dir: str, repeats: int = 5, seed: int = 0) -> Dict[str, Any]:
    records = audit_variable_counts(default_count_sweep(), seed=seed)
    summaries = audit_construction_scaling(repeats=repeats, seed=seed)
    os.makedirs(out_dir, exist_ok=True)
    write_records_csv(records, os.path.join(out_dir, "scaling_records.csv"))
    write_summary_json(summaries, os.path.join(out_dir, "scaling_summary.json"))
    exceeded = [f"{s['model']}/{s['axis']}" for s in summaries if not s["within_bound"]]
    if exceeded:
        raise VerificationFailure(f"construction time grew faster than claimed on: {', '.join(exceeded)}")
    return {"records": len(records), "axes": len(summaries)}


def attach_precision_values(argv: List[str]) -> List[str]:
    """
    Join `--precision VALUE` into `--precision=VALUE`.

    argparse reads a value such as "-1,-0.5,0.5,1" as an unknown flag; the
    attached form keeps it a value.
    """
    out: List[str] = []
    tokens = iter(argv)
    for token in tokens:
        if token == "--precision":
            value = next(tokens, None)
            out.append(token if value is None else f"--precision={value}")
        else:
            out.append(token)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubo-trainer",
        description="Train linear regression, SVM and equal-size k-means models as QUBO problems.",
    )
    parser.add_argument("--log-level", default=config.QUBO_LOG_LEVEL, help="Logging level (default: %(default)s)")
    parser.add_argument("-v", "--verbose", action="store_true", help="Shortcut for --log-level INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("formulate", "write the QUBO instance and its variable legend"),
        ("solve", "formulate, solve and decode"),
        ("verify", "solve and compare with the classical oracle"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="KEY=VALUE file; command-line flags override its values")
        cmd.add_argument("--model", choices=MODELS)
        cmd.add_argument("--data", help="CSV training data")
        cmd.add_argument("--precision", help='Comma-separated powers of two, e.g. "-1,-0.5,0.5,1"')
        cmd.add_argument("--k", type=int, help="Number of clusters (kmeans)")
        cmd.add_argument("--alpha", type=float, help="Cluster-size penalty (kmeans)")
        cmd.add_argument("--beta", type=float, help="Single-assignment penalty (kmeans)")
        cmd.add_argument("--solver", choices=SOLVERS)
        cmd.add_argument("--sweeps", type=int)
        cmd.add_argument("--restarts", type=int)
        cmd.add_argument("--t-hi", dest="t_hi", type=float)
        cmd.add_argument("--t-lo", dest="t_lo", type=float)
        cmd.add_argument("--seed", type=int)
        cmd.add_argument("--out", help="Output path (stdout for reports when omitted)")
        cmd.add_argument("--exact-max-variables", dest="exact_max_variables", type=int)
        cmd.add_argument("--workers", type=int)

    audit = sub.add_parser("audit", help="check variable counts and construction scaling")
    audit.add_argument("--out-dir", default="audit_results")
    audit.add_argument("--repeats", type=int, default=5)
    audit.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(attach_precision_values(argv))
    level = "INFO" if args.verbose else str(args.log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.command == "audit":
            cmd_audit(args.out_dir, repeats=args.repeats, seed=args.seed)
            return EXIT_OK
        overrides = {name: getattr(args, name) for name in RUN_FLAGS}
        run_config = RunConfig.from_sources(args.config, overrides)
        if args.command == "formulate":
            cmd_formulate(run_config)
        elif args.command == "solve":
            cmd_solve(run_config)
        else:
            cmd_verify(run_config)
    except QuboTrainerError as e:
        logger.error("%s", str(e))
        return e.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
