# CommandLine.py
# The gdblow command: classify, ode, portrait, pde and xval.

import argparse
import json
import math
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

from .Criterion import (
    classify_profile,
    entropy_form_K,
    entropy_monotone_sufficient,
    pressure_extrema,
)
from .CrossValidator import CrossValidator
from .EulerFV import simulate
from .GasBasics import DomainError, ExitCode, GdblowError, ODEAdjustment, Outcome, defaultODE
from .GasState import GasParams, PrimitiveState
from .Profile import sample_arrays
from .ReportExporter import ReportExporter, report_header
from .RiemannODE import (
    circle_seeds,
    grid_seeds,
    integrate,
    integrate_ray,
    phase_portrait,
    predict_catastrophe_time,
    separatrix_seed,
)
from .RiemannSlopes import FirstIntegral, PVector, RayState, RState
from .Scenario import Scenario, resolve_scenario

logger = logging.getLogger(__name__)


class GdblowArgumentParser(argparse.ArgumentParser):
    """Usage errors leave with the input-error exit code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.error.value, f"{self.prog}: usage error: {message}\n")


def _emit(summary: Dict[str, Any]):
    print(json.dumps(summary, sort_keys=False))


def _exporter(scenario: Optional[Scenario] = None) -> ReportExporter:
    root = "." if scenario is None else scenario.output.get("dir", ".")
    return ReportExporter(root)


def _finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise DomainError(f"--{name} must be finite, got {value}", field=name)
    return value


# ----------------------------------------------------------------------
#                               SEEDS
# ----------------------------------------------------------------------


def parse_seeds(spec: str, b: float, gamma: float) -> List[Tuple[float, float]]:
    """
    Portrait seed specs:
        circle:N:r                     N points on a circle of radius r
        grid:r1min:r1max:r2min:r2max:n1:n2
        points:r1,r2;r1,r2;...
        separatrix[:R2]                the C = 0 point for b < 0

    Raises:
        DomainError: malformed spec.
    """
    kind, _, rest = spec.partition(":")
    try:
        if kind == "circle":
            n, r = rest.split(":")
            return circle_seeds(int(n), float(r))
        if kind == "grid":
            r1a, r1b, r2a, r2b, n1, n2 = rest.split(":")
            return grid_seeds((float(r1a), float(r1b)), (float(r2a), float(r2b)), int(n1), int(n2))
        if kind == "points":
            seeds = [tuple(float(v) for v in pair.split(",")) for pair in rest.split(";") if pair.strip()]
            if not seeds or any(len(s) != 2 for s in seeds):
                raise DomainError(f"malformed seed spec {spec!r}: expected r1,r2 pairs", field="seeds")
            return seeds
        if kind == "separatrix":
            if not (b < 0.0 and gamma > 1.0):
                raise DomainError("the separatrix seed needs b < 0 and gamma > 1", field="seeds")
            return [separatrix_seed(b, gamma, float(rest) if rest else 1.0)]
    except ValueError as e:
        if isinstance(e, DomainError):
            raise
        raise DomainError(f"malformed seed spec {spec!r}: {e}", field="seeds") from e
    raise DomainError(f"unknown seed spec {spec!r}, expected circle:, grid:, points: or separatrix", field="seeds")


# ----------------------------------------------------------------------
#                              COMMANDS
# ----------------------------------------------------------------------


def cmd_classify(args: argparse.Namespace) -> ExitCode:
    scenario = resolve_scenario(args.scenario)
    if args.nodes is not None:
        scenario.criterion.nodes = args.nodes
    gp = scenario.gas
    verdict = classify_profile(scenario.profile, gp, scenario.criterion)
    if not verdict.smooth:
        predict_catastrophe_time(verdict, gp, scenario.ode)

    report = report_header("classify", scenario.asDict())
    report["verdict"] = verdict.asDict(with_points=False)
    report["indicators"] = [pv.indicators.asDict() for pv in verdict.points]
    if not gp.chaplygin:
        report["pressure_extrema"] = [e.asDict() for e in pressure_extrema(scenario.profile, gp, adj=scenario.criterion)]
    if args.entropy_form or scenario.output.get("entropy_form", False):
        logger.warning("entropy-form K requested; it is reported only, the verdict does not use it")
        sample = sample_arrays(scenario.profile, scenario.profile.uniform_grid(scenario.criterion.nodes), gp)
        report["entropy_form"] = [
            {
                "x": pd.x,
                "entropy_form_K": entropy_form_K(pd, gp, scenario.criterion),
                "entropy_monotone_sufficient": entropy_monotone_sufficient(pd, gp, scenario.criterion),
            }
            for pd in sample.points()
        ]

    out = args.out or scenario.output.get("report", "report.json")
    path = _exporter(scenario).write_json(report, out)
    _emit({
        "smooth": verdict.smooth,
        "label": verdict.label,
        "witnesses": len(verdict.witnesses),
        "predicted_T": verdict.predicted_T,
        "report": str(path),
    })
    return ExitCode.smooth if verdict.smooth else ExitCode.blowup


def cmd_ode(args: argparse.Namespace) -> ExitCode:
    r1, r2, b = _finite("r1", args.r1), _finite("r2", args.r2), _finite("b", args.b)
    gp = GasParams(args.gamma)
    if args.t_max is not None and not args.t_max > 0.0:
        raise DomainError(f"--t-max must be positive, got {args.t_max}", field="t_max")
    if args.tol is not None and not args.tol > 0.0:
        raise DomainError(f"--tol must be positive, got {args.tol}", field="tol")

    R0 = RState(r1, r2, b, gp.gamma)
    fi = FirstIntegral.of(R0)
    if args.ray:
        K = b + 0.5 * (gp.gamma - 1.0)
        P = PVector(r1 - r2, -2.0 * K * r2, r1 + r2)
        state = PrimitiveState(args.v, args.rho, args.p).check(gp)
        traj = integrate_ray(RayState.from_primitive(state, P), gp, args.t_max,
                             ode=_ode_adjustment(args))
    else:
        traj = integrate(R0, args.t_max, args.tol)

    summary: Dict[str, Any] = {"outcome": traj.outcome.value, "T": traj.T}
    if traj.bracket is not None:
        summary["bracket"] = list(traj.bracket)
    summary["C"] = fi.value(r1, r2)
    summary["c_drift"] = traj.c_drift
    if b < 0.0 and summary["C"] is not None:
        summary["C_nonnegative"] = summary["C"] >= 0.0
    if not args.ray and b > 0.0 and r2 != 0.0 and traj.outcome == Outcome.bounded:
        back = integrate(R0, args.t_max, args.tol, direction=-1)
        summary["closed_orbit"] = back.outcome == Outcome.bounded
    if traj.low_confidence:
        summary["low_confidence"] = True
    if traj.threshold_exceeded:
        summary["threshold_exceeded"] = True

    if args.out:
        summary["csv"] = str(ReportExporter().write_trajectory(traj, args.out))
    _emit(summary)
    return ExitCode.smooth if traj.outcome == Outcome.bounded else ExitCode.blowup


def _ode_adjustment(args: argparse.Namespace) -> ODEAdjustment:
    return defaultODE if args.tol is None else defaultODE.with_tol(args.tol)


def cmd_portrait(args: argparse.Namespace) -> ExitCode:
    b = _finite("b", args.b)
    gp = GasParams(args.gamma)
    seeds = parse_seeds(args.seeds, b, gp.gamma)
    curves = phase_portrait(b, gp, seeds, args.t_max)
    counts: Dict[str, int] = {}
    for curve in curves:
        tag = "error" if curve.error is not None else curve.outcome.value
        counts[tag] = counts.get(tag, 0) + 1
    path = ReportExporter().write_portrait(curves, args.out)
    _emit({"seeds": len(curves), "outcomes": counts, "loops": sum(c.loop for c in curves), "csv": str(path)})
    return ExitCode.smooth


def cmd_pde(args: argparse.Namespace) -> ExitCode:
    scenario = resolve_scenario(args.scenario)
    result = simulate(
        scenario.profile,
        scenario.gas,
        t_end=args.t_end,
        cells=args.cells or scenario.finest_cells,
        cfl=args.cfl,
        fv=scenario.fv,
    )
    prefix = args.prefix or scenario.name or "pde"
    paths = _exporter(scenario).write_simulation(result, prefix)
    summary = result.summary()
    if result.t_steepen is None and result.completed:
        summary["statement"] = "bounded gradients"
    summary["files"] = [str(p) for p in paths]
    _emit(summary)
    return ExitCode.smooth if result.completed and result.t_steepen is None else ExitCode.blowup


def cmd_xval(args: argparse.Namespace) -> ExitCode:
    scenario = resolve_scenario(args.scenario)
    xval = CrossValidator(scenario)
    status = xval.run()
    report = args.out or scenario.output.get("report", "report.json")
    log = None if args.no_log else (args.log or scenario.output.get("log", "log.md"))
    paths = xval.write(_exporter(scenario), report, log)
    _emit({"status": status.value, "details": xval.details, "files": [str(p) for p in paths]})
    return xval.exit_code


COMMANDS = {
    "classify": cmd_classify,
    "ode": cmd_ode,
    "portrait": cmd_portrait,
    "pde": cmd_pde,
    "xval": cmd_xval,
}


def build_parser() -> argparse.ArgumentParser:
    parser = GdblowArgumentParser(
        prog="gdblow",
        description="Gradient-catastrophe analysis of smooth 1D gas-dynamics data.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=GdblowArgumentParser)

    classify = sub.add_parser("classify", help="Smooth / blow-up verdict for a scenario")
    classify.add_argument("scenario", help="scenario TOML file or preset name")
    classify.add_argument("--out", default=None, help="JSON report path")
    classify.add_argument("--nodes", type=int, default=None)
    classify.add_argument("--entropy-form", action="store_true", help="add the entropy-based K to the report")

    ode = sub.add_parser("ode", help="Integrate the reduced slope system from one state")
    ode.add_argument("--r1", type=float, required=True)
    ode.add_argument("--r2", type=float, required=True)
    ode.add_argument("--b", type=float, default=0.0)
    ode.add_argument("--gamma", type=float, default=1.4)
    ode.add_argument("--t-max", type=float, default=None)
    ode.add_argument("--tol", type=float, default=None)
    ode.add_argument("--out", default=None, help="trajectory CSV path")
    ode.add_argument("--ray", action="store_true", help="integrate state and slopes along the ray")
    ode.add_argument("--v", type=float, default=0.0, help="velocity at the foot point (--ray)")
    ode.add_argument("--rho", type=float, default=1.0, help="density at the foot point (--ray)")
    ode.add_argument("--p", type=float, default=1.0, help="pressure at the foot point (--ray)")

    portrait = sub.add_parser("portrait", help="Phase curves of the reduced system")
    portrait.add_argument("--b", type=float, required=True)
    portrait.add_argument("--gamma", type=float, default=1.4)
    portrait.add_argument("--seeds", required=True, help="circle:N:r | grid:... | points:r1,r2;... | separatrix")
    portrait.add_argument("--t-max", type=float, default=None)
    portrait.add_argument("--out", required=True, help="polyline CSV path")

    pde = sub.add_parser("pde", help="Finite-volume run with gradient history")
    pde.add_argument("scenario", help="scenario TOML file or preset name")
    pde.add_argument("--cells", type=int, default=None)
    pde.add_argument("--cfl", type=float, default=None)
    pde.add_argument("--t-end", type=float, default=None)
    pde.add_argument("--prefix", default=None, help="file prefix of the CSV series")

    xval = sub.add_parser("xval", help="Classifier, ODE and finite volumes side by side")
    xval.add_argument("scenario", help="scenario TOML file or preset name")
    xval.add_argument("--out", default=None, help="JSON report path")
    xval.add_argument("--log", default=None, help="Markdown log path")
    xval.add_argument("--no-log", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        code = COMMANDS[args.command](args)
    except GdblowError as e:
        print(str(e), file=sys.stderr)
        return ExitCode.error.value
    return code.value


if __name__ == "__main__":
    sys.exit(main())
