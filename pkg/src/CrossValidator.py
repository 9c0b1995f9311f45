# CrossValidator.py
# Runs classifier, slope ODEs and the finite-volume solver on one scenario and
# checks that the three agree.

import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple
import logging

import numpy as np

from .Criterion import GlobalVerdict, classify_profile
from .EulerFV import SimulationResult, simulate
from .GasBasics import ExitCode, GdblowError, Outcome, XValStatus
from .RiemannODE import chaplygin_solve, integrate, predict_catastrophe_time
from .RiemannSlopes import FirstIntegral, RState
from .ReportExporter import ReportExporter, report_header
from .Scenario import Scenario

logger = logging.getLogger(__name__)

MAX_ODE_RUNS = 16  # distinct slope states integrated per scenario
STEEPEN_WINDOW = (0.5, 1.5)  # accepted t_steepen / predicted_T


class XValStage:
    """One link of the stage chain: classify, ode or pde."""

    def __init__(self, name: str):
        self.name: str = name
        self.status: str = "pending"  # ok | failed | skipped
        self.message: str = ""
        self.error: str = ""

    def has_failed(self) -> bool:
        return self.status == "failed"

    def asDict(self) -> Dict[str, str]:
        return {"name": self.name, "status": self.status, "message": self.message or self.error}

    def __repr__(self) -> str:
        return f"XValStage(name={self.name}, status={self.status})"


def _slope_state(pv, gamma: float) -> RState:
    ind = pv.indicators
    if ind.k_infinite:
        return RState(ind.R1, 0.0, 0.0 if gamma != -1.0 else 1.0, gamma)
    return RState(ind.R1, ind.R2, ind.b, gamma)


def _spread(items: List[Any], limit: int) -> List[Any]:
    if len(items) <= limit:
        return items
    picks = np.unique(np.linspace(0, len(items) - 1, limit).round().astype(int))
    return [items[i] for i in picks]


class CrossValidator:
    """
    Classify the scenario's profile, integrate the slope ODEs for the
    witnesses (or a sample of safe nodes) and run the finite-volume solver
    at every configured grid.

    The run is Consistent when a smooth verdict goes with bounded gradients
    up to t_end, and a blow-up verdict with a steepening time inside
    [0.5, 1.5] x predicted_T on the finest grid. A failing stage leaves the
    later ones skipped and the status Partial.

    Args:
        scenario: What to run.
        predicted_T: Replaces the ODE prediction of a blow-up verdict;
            negative controls use it to feed a wrong time.
    """

    def __init__(self, scenario: Scenario, predicted_T: Optional[float] = None):
        self.scenario: Scenario = scenario
        self.predicted_T_override: Optional[float] = predicted_T
        self.stages: List[XValStage] = []
        self.verdict: Optional[GlobalVerdict] = None
        self.ode_runs: List[Dict[str, Any]] = []
        self.ode_bound: Optional[float] = None
        self.pde_runs: List[Tuple[int, SimulationResult]] = []
        self.status: XValStatus = XValStatus.partial
        self.details: Dict[str, Any] = {}
        self.started: Optional[datetime.datetime] = None
        self.finished: Optional[datetime.datetime] = None

    # ------------------------------------------------------------------ stages

    def _stage(self, name: str, work: Callable[[XValStage], None]) -> XValStage:
        stage = XValStage(name)
        self.stages.append(stage)
        if any(s.status in ("failed", "skipped") for s in self.stages[:-1]):
            stage.status = "skipped"
            stage.message = "an earlier stage did not complete"
            return stage
        logger.info(f"stage {name} started")
        try:
            work(stage)
            if stage.status == "pending":
                stage.status = "ok"
        except GdblowError as e:
            stage.status = "failed"
            stage.error = str(e)
            logger.warning(f"stage {name} failed: {e}")
        logger.info(f"stage {name} finished: {stage.status}")
        return stage

    def _classify(self, stage: XValStage):
        sc = self.scenario
        verdict = classify_profile(sc.profile, sc.gas, sc.criterion)
        if not verdict.smooth:
            predict_catastrophe_time(verdict, sc.gas, sc.ode)
            if self.predicted_T_override is not None:
                verdict.set_predicted_T(self.predicted_T_override)
        self.verdict = verdict
        stage.message = (
            "smooth" if verdict.smooth else f"{len(verdict.witnesses)} witnesses, predicted_T={verdict.predicted_T!r}"
        )

    def _ode(self, stage: XValStage):
        sc = self.scenario
        gamma = sc.gas.gamma
        verdict = self.verdict
        pool = verdict.witnesses if not verdict.smooth else verdict.points
        distinct: Dict[Tuple[float, float, float], Tuple[float, RState]] = {}
        for pv in pool:
            R = _slope_state(pv, gamma)
            distinct.setdefault((R.R1, R.R2, R.b), (pv.x, R))
        states = _spread(list(distinct.values()), MAX_ODE_RUNS)

        for x, R in states:
            if gamma == -1.0:
                solved = chaplygin_solve(R.R1, R.R2, R.b - 1.0)
                record = {"x": x, "kind": "chaplygin", "initial": [R.R1, R.R2], "b": R.b}
                record.update({"outcome": solved.outcome.value, "T": solved.T})
            else:
                traj = integrate(R, ode=sc.ode)
                record = {"x": x, "kind": "R", "b": R.b}
                record.update(traj.summary())
            self.ode_runs.append(record)

        if verdict.smooth:
            bound = 0.0
            for pv in verdict.points:
                R = _slope_state(pv, gamma)
                bound = max(bound, FirstIntegral.of(R).max_abs_r1(R))
            self.ode_bound = bound
            escaped = [r["x"] for r in self.ode_runs if r["outcome"] != Outcome.bounded.value]
            stage.message = f"{len(self.ode_runs)} safe states integrated, bound max|R1| = {bound!r}"
            if escaped:
                logger.warning(f"safe nodes with escaping slope trajectories: {escaped}")
        else:
            stage.message = f"{len(self.ode_runs)} witness states integrated"

    def _pde(self, stage: XValStage):
        sc = self.scenario
        if sc.gas.gamma < 1.0:
            stage.status = "skipped"
            stage.message = f"the finite-volume solver needs gamma >= 1, got {sc.gas.gamma}"
            return
        for cells in sc.refine:
            result = simulate(sc.profile, sc.gas, cells=cells, fv=sc.fv)
            self.pde_runs.append((cells, result))
        cells, finest = self.pde_runs[-1]
        stage.message = f"{len(self.pde_runs)} grids, finest {cells} cells: t_steepen={finest.t_steepen!r}"

    # ---------------------------------------------------------------- decision

    def _decide(self):
        if any(s.status != "ok" for s in self.stages):
            self.status = XValStatus.partial
            self.details = {"stages": [s.asDict() for s in self.stages if s.status != "ok"]}
            return
        verdict = self.verdict
        cells, finest = self.pde_runs[-1]
        fv = self.scenario.fv
        if verdict.smooth:
            limit = fv.compare_factor * self.ode_bound
            ok = finest.completed and finest.max_gradient <= limit
            pde_says = (
                "bounded" if ok else
                ("breakdown" if not finest.completed else f"gradient {finest.max_gradient!r} above {limit!r}")
            )
            points = [] if ok else [finest.history.x_argmax[int(np.argmax(finest.history.dvdx_max))]]
            classify_says = "smooth"
        else:
            T = verdict.predicted_T
            ts = finest.t_steepen
            ok = T is not None and ts is not None and STEEPEN_WINDOW[0] * T <= ts <= STEEPEN_WINDOW[1] * T
            pde_says = "never steepened" if ts is None else f"steepened at t={ts!r}"
            points = [pv.x for pv in verdict.witnesses]
            classify_says = f"blow-up at T={T!r}"
        self.status = XValStatus.consistent if ok else XValStatus.discrepant
        self.details = {"cells": cells, "classify": classify_says, "pde": pde_says}
        if not ok:
            self.details["points"] = points
            logger.warning(f"discrepancy: classifier says {classify_says}, finite volumes say {pde_says}")

    def run(self) -> XValStatus:
        self.started = datetime.datetime.now()
        self._stage("classify", self._classify)
        self._stage("ode", self._ode)
        self._stage("pde", self._pde)
        self._decide()
        self.finished = datetime.datetime.now()
        logger.info(f"cross-validation of {self.scenario.name}: {self.status.value}")
        return self.status

    # ----------------------------------------------------------------- output

    @property
    def exit_code(self) -> ExitCode:
        if self.status == XValStatus.consistent:
            return ExitCode.smooth
        if self.status == XValStatus.discrepant:
            return ExitCode.blowup
        return ExitCode.error

    def pde_summary(self) -> Dict[str, Any]:
        if not self.pde_runs:
            return {}
        runs = [dict(result.summary()) for _, result in self.pde_runs]
        steepen = [r["t_steepen"] for r in runs]
        result: Dict[str, Any] = {"runs": runs}
        if len(runs) > 1 and all(t is not None for t in steepen):
            result["t_steepen_decreasing"] = all(b <= a + 1e-3 for a, b in zip(steepen, steepen[1:]))
        if self.verdict is not None and self.verdict.smooth:
            result["statement"] = "bounded gradients" if self.status == XValStatus.consistent else "gradients not bounded"
        return result

    def report(self) -> Dict[str, Any]:
        result = report_header("xval", self.scenario.asDict())
        if self.verdict is not None:
            result["verdict"] = self.verdict.asDict(with_points=False)
            result["indicators"] = [pv.indicators.asDict() for pv in self.verdict.points]
        result["ode"] = {"bound_max_abs_R1": self.ode_bound, "runs": self.ode_runs}
        result["pde"] = self.pde_summary()
        result["xval"] = {"status": self.status.value, "details": self.details}
        result["stages"] = [s.asDict() for s in self.stages]
        return result

    def log(self) -> str:
        """Markdown record of the run: scenario, stage chain, verdict and summaries."""
        sc = self.scenario
        md = f"# Cross-validation: {sc.name}\n\n"
        if self.started is not None:
            md += f"Started {self.started.isoformat(timespec='seconds')}"
            if self.finished is not None:
                md += f", finished {self.finished.isoformat(timespec='seconds')}"
            md += "\n\n"
        md += "## Scenario\n\n```\n"
        md += f"gamma   = {sc.gas.gamma}\n"
        md += f"v0      = {sc.profile.v0.to_text()}\n"
        md += f"rho0    = {sc.profile.rho0.to_text()}\n"
        md += f"p0      = {sc.profile.p0.to_text()}\n"
        md += f"domain  = [{sc.profile.a}, {sc.profile.b}]\n"
        md += f"grids   = {sc.refine}\n```\n\n"

        md += "## Stage Chain\n\n```\n"
        for i, stage in enumerate(self.stages):
            if i > 0:
                md += "| "
            md += f"{stage.name}  ->  {stage.status}: {stage.message or stage.error}\n"
        md += "```\n\n"

        if self.verdict is not None:
            v = self.verdict
            md += "## Verdict\n\n"
            md += f"* smooth: {v.smooth}\n* label: {v.label}\n* predicted_T: {v.predicted_T}\n"
            md += f"* nodes: {len(v.points)}, witnesses: {len(v.witnesses)}\n\n"
            if v.witnesses:
                md += "### Witnesses\n\n"
                for pv in v.witnesses[:10]:
                    md += f"* x = {pv.x:.6g}: R1 = {pv.indicators.R1:.6g}, R2 = {pv.indicators.R2:.6g}, sets: {pv.sets}\n"
                if len(v.witnesses) > 10:
                    md += f"* ... {len(v.witnesses) - 10} more\n"
                md += "\n"

        if self.ode_runs:
            md += "## Slope ODEs\n\n"
            for run in self.ode_runs:
                md += f"* x = {run['x']:.6g}: {run['outcome']}, T = {run.get('T')}\n"
            md += "\n"

        if self.pde_runs:
            md += "## Finite Volumes\n\n| cells | t reached | t_steepen | max dv/dx | completed |\n|---|---|---|---|---|\n"
            for cells, result in self.pde_runs:
                md += f"| {cells} | {result.final.t:.6g} | {result.t_steepen} | {result.max_gradient:.6g} | {result.completed} |\n"
            md += "\n"

        md += f"## Status\n\n__{self.status.value}__\n"
        for key, value in self.details.items():
            md += f"* {key}: {value}\n"
        return md

    def write(self, exporter: ReportExporter, report: str = "report.json", log: Optional[str] = "log.md") -> List[Path]:
        paths = [exporter.write_json(self.report(), report)]
        if log:
            paths.append(exporter.write_text(self.log(), log))
        return paths
