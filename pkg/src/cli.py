"""
Command-line Front End for pshlab
Subcommands analyze, verify, sweep and regularize-check. Tables are written with
pandas as CSV, reports as versioned JSON with sorted keys.

Usage:
    python pshlab.py analyze demailly-m2
    python pshlab.py analyze u1-n5 --t-min -30 --plot
    python pshlab.py verify --format json
    python pshlab.py sweep --param-range demailly:1..5
    python pshlab.py regularize-check log-norm --eps 0.01,0.005
"""

import argparse
import json
import math
import re
import sys
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src import __version__
from src.catalog import DEFAULT_NAMES, FunctionSpec, get_function, load_catalog
from src.charts import write_trace_html
from src.config import get_default_seed
from src.constants import (
    CSV_FLOAT_FORMAT,
    DEFAULT_A_MAX,
    DEFAULT_A_SCHEDULE,
    DEFAULT_EPSILONS,
    DEFAULT_GRID,
    DEFAULT_OUT_DIR,
    DEFAULT_T_MAX,
    DEFAULT_T_STEP,
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    JSON_FLOAT_DIGITS,
    QUADRATURE_ACCURACY,
    REGULARIZE_COLUMNS,
    REGULARIZE_GRID,
    REPORT_COLUMNS,
    SCHEMA_VERSION,
    SLOPE_WINDOW,
    TRACE_COLUMNS,
    VERDICT_TOL,
)
from src.errors import CatalogParseError, ConfigError, PshlabError, UnknownFunctionError
from src.lelong import default_schedule
from src.logger import setup_logger
from src.oracle import MassReport, verify_bounds
from src.quadrature import make_grid
from src.ray import trace
from src.regularize import check_regularization
from src.validators import validate_distance_schedule, validate_grid_spec, validate_param_range

logger = setup_logger(__name__)

# Sweep families: name template and whether the parameter is an integer
SWEEP_FAMILIES: Dict[str, Tuple[str, bool]] = {
    "demailly": ("demailly-m{}", True),
    "radial": ("radial-a{}", False),
    "u1": ("u1-n{}", True),
    "u2": ("u2-n{}", True),
    "coman-guedj": ("coman-guedj-n{}", True),
}


# ============================================================================
# Run Configuration
# ============================================================================

@dataclass(frozen=True)
class RunConfig:
    """Validated command-line settings; serialized into every report."""
    command: str
    functions: Tuple[str, ...] = ()
    catalog: Optional[str] = None
    n_theta: int = 64
    n_phi: int = 128
    t_min: Optional[float] = None  # deepest t; per-member default_schedule when None
    t_max: float = DEFAULT_T_MAX
    t_step: float = DEFAULT_T_STEP
    A_schedule: Tuple[float, ...] = DEFAULT_A_SCHEDULE
    epsilons: Tuple[float, ...] = DEFAULT_EPSILONS
    fmt: str = "csv"
    out: str = DEFAULT_OUT_DIR
    seed: int = 0
    tol: float = VERDICT_TOL
    plot: bool = False
    param_range: Optional[str] = None

    def as_dict(self) -> Dict[str, object]:
        return asdict(self)


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", default=DEFAULT_GRID,
                        help=f"Direction grid n_theta x n_phi (default {DEFAULT_GRID})")
    common.add_argument("--t-min", type=float, default=None,
                        help="Deepest log-radius (default -40, or -25 for finite-difference kinds)")
    common.add_argument("--t-max", type=float, default=DEFAULT_T_MAX,
                        help=f"Shallowest log-radius (default {DEFAULT_T_MAX:g})")
    common.add_argument("--t-step", type=float, default=DEFAULT_T_STEP,
                        help=f"Step of the t-schedule (default {DEFAULT_T_STEP:g})")
    common.add_argument("--a-max", type=float, default=DEFAULT_A_MAX,
                        help=f"Largest distance A of the lambda schedule (default {DEFAULT_A_MAX:g})")
    common.add_argument("--eps", default=None,
                        help="Comma-separated mollifier radii (default 0.01,0.005)")
    common.add_argument("--out", default=DEFAULT_OUT_DIR,
                        help=f"Output directory (default {DEFAULT_OUT_DIR})")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv",
                        help="Table format (reports are always JSON)")
    common.add_argument("--seed", type=int, default=None,
                        help="Seed of every random path (default PSHLAB_SEED)")
    common.add_argument("--tol", type=float, default=VERDICT_TOL,
                        help=f"Tolerance of the bound verdicts (default {VERDICT_TOL:g})")
    common.add_argument("--catalog", default=None,
                        help="Spec file with additional catalog members")
    common.add_argument("--plot", action="store_true",
                        help="Write an HTML chart of the trace (analyze)")

    parser = argparse.ArgumentParser(
        prog="pshlab",
        description="Residual Monge-Ampere mass, Lelong numbers and fiber functionals "
                    "of plurisubharmonic functions on the unit ball of C^2",
    )
    parser.add_argument("--version", action="version", version=f"pshlab {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    analyze_parser = subparsers.add_parser("analyze", parents=[common],
                                           help="Trace one member and report nu, lambda, tau")
    analyze_parser.add_argument("function", help="Catalog name, e.g. demailly-m2")

    verify_parser = subparsers.add_parser("verify", parents=[common],
                                          help="Check nu^2 <= tau <= 2 lambda nu + nu^2 on a catalog")
    verify_parser.add_argument("functions", nargs="*",
                               help="Members to verify (default: the whole catalog)")

    sweep_parser = subparsers.add_parser("sweep", parents=[common],
                                         help="One report row per parameter value")
    sweep_parser.add_argument("--param-range", required=True,
                              help="family:lo..hi or family:v1,v2 (e.g. demailly:1..5, radial:0.5,1,2)")

    regularize_parser = subparsers.add_parser("regularize-check", parents=[common],
                                              help="Mollifier monotonicity, Friedrichs and slope checks")
    regularize_parser.add_argument("function", help="Catalog name")

    return parser.parse_args(argv)


def _float_list(text: str, label: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"❌ {label} must be a comma-separated list of numbers (got {text!r})")


def _a_schedule(a_max: float) -> Tuple[float, ...]:
    schedule = tuple(a for a in DEFAULT_A_SCHEDULE if a < a_max) + (float(a_max),)
    is_valid, message = validate_distance_schedule(schedule, reach=20.0)
    if not is_valid:
        raise ConfigError(message)
    return schedule


def _build_config(args: argparse.Namespace) -> RunConfig:
    """
    Validate parsed arguments into a RunConfig.

    Raises:
        ConfigError: With the validator message of the first invalid flag
    """
    is_valid, message = validate_grid_spec(args.grid)
    if not is_valid:
        raise ConfigError(message)
    n_theta, n_phi = (int(v) for v in re.split(r"[xX]", args.grid.strip()))

    if not args.t_max < 0:
        raise ConfigError(f"❌ --t-max must be negative (got {args.t_max:g})")
    if not args.t_step > 0:
        raise ConfigError(f"❌ --t-step must be positive (got {args.t_step:g})")
    if args.t_min is not None:
        if not args.t_min < args.t_max:
            raise ConfigError(f"❌ --t-min must lie below --t-max (got {args.t_min:g})")
        if args.command != "regularize-check" and args.t_min > -20.0:
            raise ConfigError(f"❌ --t-min must reach -20 for Lelong limits (got {args.t_min:g})")
    if not args.tol > 0:
        raise ConfigError(f"❌ --tol must be positive (got {args.tol:g})")

    epsilons = _float_list(args.eps, "--eps") if args.eps else DEFAULT_EPSILONS
    if not epsilons or any(e <= 0 for e in epsilons):
        raise ConfigError("❌ --eps needs positive values")

    param_range = getattr(args, "param_range", None)
    if param_range is not None:
        is_valid, message = validate_param_range(param_range, list(SWEEP_FAMILIES))
        if not is_valid:
            raise ConfigError(message)
        _sweep_names(param_range)

    if args.command in ("analyze", "regularize-check"):
        functions = (args.function,)
    else:
        functions = tuple(getattr(args, "functions", ()) or ())

    return RunConfig(
        command=args.command,
        functions=functions,
        catalog=args.catalog,
        n_theta=n_theta,
        n_phi=n_phi,
        t_min=args.t_min,
        t_max=args.t_max,
        t_step=args.t_step,
        A_schedule=_a_schedule(args.a_max),
        epsilons=epsilons,
        fmt=args.fmt,
        out=args.out,
        seed=get_default_seed() if args.seed is None else args.seed,
        tol=args.tol,
        plot=args.plot,
        param_range=param_range,
    )


def _sweep_names(param_range: str) -> List[str]:
    """Catalog names of a validated sweep range, e.g. demailly:1..3 -> demailly-m1..m3."""
    family, values = param_range.strip().split(":", 1)
    template, integer = SWEEP_FAMILIES[family.strip()]
    bounds = re.fullmatch(r"\s*(\d+)\.\.(\d+)\s*", values)
    if bounds:
        numbers = [float(v) for v in range(int(bounds.group(1)), int(bounds.group(2)) + 1)]
    else:
        numbers = [float(v) for v in values.split(",")]
    if integer:
        if any(not v.is_integer() or v < 1 for v in numbers):
            raise ConfigError(f"❌ {family} takes positive integers (got {values})")
        return [template.format(int(v)) for v in numbers]
    return [template.format(f"{v:g}") for v in numbers]


def _t_grid(cfg: RunConfig, f: FunctionSpec) -> List[float]:
    """Increasing t-schedule from --t-min (or the member's default depth) to --t-max."""
    t_min = cfg.t_min if cfg.t_min is not None else min(default_schedule(f))
    count = int(math.floor((cfg.t_max - t_min) / cfg.t_step + 1e-9)) + 1
    return [round(t_min + k * cfg.t_step, 12) for k in range(count)]


# ============================================================================
# Output Writers
# ============================================================================

def _clean(value):
    """JSON-ready copy: numpy scalars unwrapped, floats cut to fixed digits, inf/nan to null."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return float(f"{x:.{JSON_FLOAT_DIGITS}g}") if math.isfinite(x) else None
    return value


def _document(cfg: RunConfig, **payload) -> Dict[str, object]:
    doc = {"schema": SCHEMA_VERSION, "version": __version__, "config": cfg.as_dict()}
    doc.update(payload)
    return doc


def _write_json(doc: Dict[str, object], path: Path) -> Path:
    path.write_text(json.dumps(_clean(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n",
                    encoding="utf-8")
    return path


def _write_csv(rows: List[Dict[str, object]], columns: Sequence[str], path: Path) -> Path:
    frame = pd.DataFrame(rows, columns=list(columns))
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def _write_table(cfg: RunConfig, stem: str, rows: List[Dict[str, object]],
                 columns: Sequence[str], **payload) -> Path:
    """rows as <stem>.csv, or as <stem>.json inside the report envelope."""
    out = _out_dir(cfg)
    if cfg.fmt == "json":
        return _write_json(_document(cfg, rows=rows, columns=list(columns), **payload),
                           out / f"{stem}.json")
    return _write_csv(rows, columns, out / f"{stem}.csv")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _print_report(report: MassReport):
    upper = ("PASS" if report.verdict_upper else "FAIL") if report.upper_applicable else report.upper_note
    print(f"{report.name}: nu={report.nu.value:.6g} lambda={report.lam.value:.6g} "
          f"tau={report.tau.value:.6g} [{report.tau.method.value}] "
          f"lower={'PASS' if report.verdict_lower else 'FAIL'} upper={upper}")


# ============================================================================
# Commands
# ============================================================================

def _extra_members(cfg: RunConfig) -> List[FunctionSpec]:
    if cfg.catalog is None:
        return []
    try:
        return load_catalog(cfg.catalog)
    except OSError as exc:
        raise ConfigError(f"❌ Cannot read catalog {cfg.catalog}: {exc}")


def _report(cfg: RunConfig, f: FunctionSpec, t_grid: Sequence[float]) -> MassReport:
    return verify_bounds(f, schedule=list(reversed(t_grid)), A_schedule=cfg.A_schedule,
                         tol=cfg.tol, seed=cfg.seed, n_theta=cfg.n_theta, n_phi=cfg.n_phi)


def cmd_analyze(cfg: RunConfig) -> int:
    """Trace one member, write the trace table and its MassReport."""
    f = get_function(cfg.functions[0])
    t_grid = _t_grid(cfg, f)
    tr = trace(f, t_grid, n_theta=cfg.n_theta, n_phi=cfg.n_phi)
    report = _report(cfg, f, t_grid)

    rows = [{c: record.as_dict()[c] for c in TRACE_COLUMNS} for record in tr.records]
    written = [
        _write_table(cfg, f"{f.name}_trace", rows, TRACE_COLUMNS, grid=tr.grid),
        _write_json(_document(cfg, reports=[report.as_dict()], grid=tr.grid, t_schedule=t_grid),
                    _out_dir(cfg) / f"{f.name}_report.json"),
    ]
    if cfg.plot:
        written.append(write_trace_html(tr, _out_dir(cfg) / f"{f.name}_trace.html"))

    _print_report(report)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK if report.passed else EXIT_FAILED


def _expects_violation(f: FunctionSpec, tol: float) -> bool:
    """Closed-form values put tau above 2 lambda nu + nu^2."""
    e = f.expected
    return e is not None and e.tau > 2.0 * e.lam * e.nu + e.nu ** 2 + tol


def _attainable_accuracy(report: MassReport) -> float:
    widths = [report.nu.upper - report.nu.lower, report.lam.upper - report.lam.lower,
              report.tau.bracket[1] - report.tau.bracket[0]]
    return max([QUADRATURE_ACCURACY] + [abs(w) for w in widths])


def _verify_failure(report: MassReport, f: FunctionSpec, tol: float) -> Optional[str]:
    accuracy = _attainable_accuracy(report)
    if tol < accuracy:
        return f"tolerance {tol:g} is below the attainable accuracy {accuracy:.1e}"
    if not report.verdict_lower:
        return f"lower bound violated: tau={report.tau.value:.6g} < nu^2={report.lower_bound:.6g}"
    if report.upper_applicable and not report.verdict_upper:
        return f"upper bound violated: tau={report.tau.value:.6g} > {report.upper_bound:.6g}"
    if not report.upper_applicable and _expects_violation(f, tol) and report.verdict_upper:
        return (f"upper bound {report.upper_bound:.6g} not violated (tau={report.tau.value:.6g}) "
                f"although the closed form violates it")
    return None


def _verify_members(cfg: RunConfig, extra: List[FunctionSpec]) -> List[FunctionSpec]:
    if cfg.functions:
        return [get_function(name) for name in cfg.functions]
    return [get_function(name) for name in DEFAULT_NAMES] + extra


def cmd_verify(cfg: RunConfig) -> int:
    """
    verify_bounds over a catalog.

    Exit 0 iff every S1-invariant member satisfies both bounds within the tolerance and
    every non-invariant member with a violating closed form violates the upper bound.
    """
    members = _verify_members(cfg, _extra_members(cfg))
    reports: List[MassReport] = []
    failures: List[Dict[str, str]] = []
    schedules: Dict[str, List[float]] = {}

    for f in members:
        if not f.smooth_off_origin:
            logger.warning(f"{f.name}: skipped, MaxOfLogs members have no residual mass oracle")
            continue
        schedules[f.name] = _t_grid(cfg, f)
        try:
            report = _report(cfg, f, schedules[f.name])
        except PshlabError as exc:
            logger.error(f"{f.name}: {exc}", exc_info=True)
            failures.append({"name": f.name, "reason": str(exc)})
            continue
        reports.append(report)
        _print_report(report)
        reason = _verify_failure(report, f, cfg.tol)
        if reason is not None:
            failures.append({"name": f.name, "reason": reason})

    rows = [report.as_row() for report in reports]
    path = _write_table(cfg, "verify", rows, REPORT_COLUMNS,
                        reports=[r.as_dict() for r in reports], failures=failures,
                        t_schedules=schedules)
    print(f"wrote {path}")

    if failures:
        for failure in failures:
            print(f"FAIL {failure['name']}: {failure['reason']}", file=sys.stderr)
        logger.info(f"verify: {len(failures)} of {len(members)} members failed")
        return EXIT_FAILED
    logger.info(f"verify: all {len(reports)} members passed")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    """One MassReport row per parameter value of --param-range."""
    names = _sweep_names(cfg.param_range)
    family = cfg.param_range.split(":", 1)[0].strip()
    reports: List[MassReport] = []
    schedules: Dict[str, List[float]] = {}
    for name in names:
        f = get_function(name)
        schedules[name] = _t_grid(cfg, f)
        report = _report(cfg, f, schedules[name])
        reports.append(report)
        _print_report(report)

    path = _write_table(cfg, f"sweep_{family}", [r.as_row() for r in reports], REPORT_COLUMNS,
                        reports=[r.as_dict() for r in reports], t_schedules=schedules)
    print(f"wrote {path}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_regularize_check(cfg: RunConfig) -> int:
    """Monotonicity, Friedrichs and regularized slope checks of one member."""
    f = get_function(cfg.functions[0])
    A, B = SLOPE_WINDOW
    report = check_regularization(f, cfg.epsilons, make_grid(*REGULARIZE_GRID), A=A, B=B,
                                  seed=cfg.seed)
    slopes = {c.epsilon: c for c in report.slope_checks}
    rows = []
    for eps, ratio in zip(report.epsilons, report.friedrichs_ratios):
        check = slopes.get(eps)
        rows.append({
            "name": f.name,
            "epsilon": eps,
            "friedrichs_ratio": ratio,
            "M_B_eps": check.M_B_eps if check else None,
            "M_A": check.M_A if check else None,
            "C_fit": check.C_fit if check else None,
            "bound": check.bound if check else None,
            "slope_passed": check.passed if check else None,
        })
    written = [
        _write_table(cfg, f"{f.name}_regularize", rows, REGULARIZE_COLUMNS),
        _write_json(_document(cfg, reports=[report.as_dict()]),
                    _out_dir(cfg) / f"{f.name}_regularize_report.json"),
    ]
    print(f"{f.name}: monotone={'PASS' if report.monotone else 'FAIL'} "
          f"friedrichs={'PASS' if report.friedrichs_passed else 'FAIL'} "
          f"slope={'PASS' if all(c.passed for c in report.slope_checks) else 'FAIL'}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK if report.passed else EXIT_FAILED


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "regularize-check": cmd_regularize_check,
}


# ============================================================================
# Entry Point
# ============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 for failed verdicts and module errors, 2 for unknown
        functions and invalid arguments
    """
    try:
        args = _parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        cfg = _build_config(args)
        if cfg.command != "verify":
            _extra_members(cfg)
        return COMMANDS[cfg.command](cfg)
    except (UnknownFunctionError, ConfigError, CatalogParseError) as exc:
        logger.error(f"{args.command}: {exc}")
        print(f"pshlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PshlabError as exc:
        logger.error(f"{args.command} failed: {exc}", exc_info=True)
        print(f"pshlab: {exc}", file=sys.stderr)
        return EXIT_FAILED
