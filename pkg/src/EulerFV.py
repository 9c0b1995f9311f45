# EulerFV.py
# Second-order finite-volume solver for the 1D Euler equations, used to watch
# gradient growth of smooth data.

from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from .GasBasics import (
    BoundaryMode,
    DomainError,
    FVAdjustment,
    SimulationBreakdown,
    defaultFV,
)
from .GasState import GasParams
from .Profile import Profile, sample_arrays

logger = logging.getLogger(__name__)

MIN_CELLS = 16


def primitives(U: np.ndarray, gamma: float) -> np.ndarray:
    """(rho, v, p) rows from conserved rows (rho, rho v, third)."""
    rho = U[0]
    v = U[1] / rho
    if gamma == 1.0:
        p = rho * np.exp(U[2] / rho)
    else:
        p = (gamma - 1.0) * (U[2] - 0.5 * rho * v * v)
    return np.array([rho, v, p])


def conserved(W: np.ndarray, gamma: float) -> np.ndarray:
    """
    Conserved rows from (rho, v, p).

    The third variable is the total energy p/(gamma-1) + rho v^2 / 2; for
    gamma = 1 it is the entropy density rho S with S = ln(p/rho).
    """
    rho, v, p = W
    if gamma == 1.0:
        third = rho * np.log(p / rho)
    else:
        third = p / (gamma - 1.0) + 0.5 * rho * v * v
    return np.array([rho, rho * v, third])


def physical_flux(W: np.ndarray, U: np.ndarray, gamma: float) -> np.ndarray:
    rho, v, p = W
    if gamma == 1.0:
        third = U[2] * v
    else:
        third = (U[2] + p) * v
    return np.array([rho * v, rho * v * v + p, third])


def minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


class GridState:
    """
    Conserved cell averages on a uniform grid of [a, b] at time t.

    Rows of U are rho, rho v and the energy-like third variable (see
    conserved()).
    """

    def __init__(
        self,
        x: np.ndarray,
        h: float,
        U: np.ndarray,
        gamma: float,
        t: float = 0.0,
        boundary: BoundaryMode = BoundaryMode.periodic,
    ):
        self.x: np.ndarray = x
        self.h: float = h
        self.U: np.ndarray = U
        self.gamma: float = gamma
        self.t: float = t
        self.boundary: BoundaryMode = boundary

    @property
    def cells(self) -> int:
        return len(self.x)

    def moved(self, U: np.ndarray, t: float) -> "GridState":
        return GridState(self.x, self.h, U, self.gamma, t, self.boundary)

    def primitives(self) -> np.ndarray:
        return primitives(self.U, self.gamma)

    @property
    def rho(self) -> np.ndarray:
        return self.U[0]

    @property
    def v(self) -> np.ndarray:
        return self.U[1] / self.U[0]

    @property
    def p(self) -> np.ndarray:
        return self.primitives()[2]

    def entropy(self) -> np.ndarray:
        """S = ln(gamma p / rho^gamma) per cell."""
        rho, _, p = self.primitives()
        return np.log(self.gamma * p) - self.gamma * np.log(rho)

    def mass(self) -> float:
        return float(np.sum(self.U[0]) * self.h)

    def momentum(self) -> float:
        return float(np.sum(self.U[1]) * self.h)

    def sound_speed(self) -> np.ndarray:
        rho, _, p = self.primitives()
        return np.sqrt(self.gamma * p / rho)

    def max_speed(self) -> float:
        return float(np.max(np.abs(self.v) + self.sound_speed()))

    def gradients(self) -> Tuple[float, float, float]:
        """(max|dv|/h, max|dp|/h, x of the largest velocity jump)."""
        _, v, p = self.primitives()
        if self.boundary == BoundaryMode.periodic:
            dv = np.diff(np.append(v, v[0]))
            dp = np.diff(np.append(p, p[0]))
        else:
            dv, dp = np.diff(v), np.diff(p)
        i = int(np.argmax(np.abs(dv)))
        return (
            float(np.abs(dv[i]) / self.h),
            float(np.max(np.abs(dp)) / self.h),
            float(self.x[i] + 0.5 * self.h),
        )

    def __repr__(self) -> str:
        return f"GridState(cells={self.cells}, h={self.h}, t={self.t}, boundary={self.boundary.value})"


def init_grid(
    pr: Profile,
    gp: GasParams,
    cells: int,
    boundary: BoundaryMode = BoundaryMode.periodic,
) -> GridState:
    """
    Cell averages by midpoint sampling of the profile.

    Raises:
        DomainError: fewer than 16 cells, gamma < 1, or a positivity violation.
    """
    if cells < MIN_CELLS:
        raise DomainError(f"at least {MIN_CELLS} cells are needed, got {cells}", field="cells")
    if gp.gamma < 1.0:
        raise DomainError(f"the finite-volume solver needs gamma >= 1, got {gp.gamma}", field="gamma")
    h = pr.length / cells
    x = pr.a + (np.arange(cells) + 0.5) * h
    sample = sample_arrays(pr, x, gp)
    W = np.array([sample.rho0, sample.v0, sample.p0])
    return GridState(x, h, conserved(W, gp.gamma), gp.gamma, 0.0, boundary)


def _with_ghosts(W: np.ndarray, boundary: BoundaryMode, gamma: float) -> np.ndarray:
    """Two ghost cells per side."""
    if boundary == BoundaryMode.periodic:
        return np.concatenate([W[:, -2:], W, W[:, :2]], axis=1)
    left = [W[:, 0], W[:, 0]]
    right = [W[:, -1], W[:, -1]]
    if boundary == BoundaryMode.linear:
        for k in (1, 2):
            for side, edge, inner in ((left, W[:, 0], W[:, 1]), (right, W[:, -1], W[:, -2])):
                ghost = edge + k * (edge - inner)
                if ghost[0] > 0.0 and gamma * ghost[2] > 0.0:
                    side[k - 1] = ghost
    return np.concatenate(
        [np.stack([left[1], left[0]], axis=1), W, np.stack([right[0], right[1]], axis=1)],
        axis=1,
    )


def _rates(U: np.ndarray, g: GridState) -> np.ndarray:
    """dU/dt from local Lax-Friedrichs fluxes of MUSCL-minmod face states."""
    gamma = g.gamma
    Wg = _with_ghosts(primitives(U, gamma), g.boundary, gamma)
    sigma = minmod(Wg[:, 1:-1] - Wg[:, :-2], Wg[:, 2:] - Wg[:, 1:-1])
    centre = Wg[:, 1:-1]
    lo, hi = centre - 0.5 * sigma, centre + 0.5 * sigma
    bad = (lo[0] <= 0.0) | (hi[0] <= 0.0) | (lo[2] <= 0.0) | (hi[2] <= 0.0)
    sigma[:, bad] = 0.0

    WL = centre[:, :-1] + 0.5 * sigma[:, :-1]
    WR = centre[:, 1:] - 0.5 * sigma[:, 1:]
    UL, UR = conserved(WL, gamma), conserved(WR, gamma)
    FL, FR = physical_flux(WL, UL, gamma), physical_flux(WR, UR, gamma)
    cL = np.sqrt(gamma * WL[2] / WL[0])
    cR = np.sqrt(gamma * WR[2] / WR[0])
    speed = np.maximum(np.abs(WL[1]) + cL, np.abs(WR[1]) + cR)
    F = 0.5 * (FL + FR) - 0.5 * speed * (UR - UL)
    return -(F[:, 1:] - F[:, :-1]) / g.h


def _check_positivity(U: np.ndarray, g: GridState, t: float):
    with np.errstate(invalid="ignore"):
        W = primitives(U, g.gamma)
        bad = ~((W[0] > 0.0) & (W[2] > 0.0) & np.all(np.isfinite(W), axis=0))
    if np.any(bad):
        cell = int(np.argmax(bad))
        raise SimulationBreakdown(
            f"positivity lost in cell {cell} (x={g.x[cell]!r}) at t={t!r}", cell=cell, time=t
        )


def stable_dt(g: GridState, cfl: float) -> float:
    return cfl * g.h / g.max_speed()


def step(g: GridState, gp: GasParams, cfl: float, dt: Optional[float] = None) -> GridState:
    """
    One SSP-RK2 step with dt = cfl h / max(|v| + c) unless dt is given.

    Raises:
        DomainError: cfl outside (0, 0.5].
        SimulationBreakdown: density or pressure lost positivity.
    """
    if not 0.0 < cfl <= 0.5:
        raise DomainError(f"cfl must lie in (0, 0.5], got {cfl}", field="cfl")
    dt = stable_dt(g, cfl) if dt is None else dt
    t = g.t + dt
    with np.errstate(invalid="ignore", divide="ignore"):
        U1 = g.U + dt * _rates(g.U, g)
        _check_positivity(U1, g, t)
        U2 = 0.5 * (g.U + U1 + dt * _rates(U1, g))
    _check_positivity(U2, g, t)
    return g.moved(U2, t)


class GradientHistory:
    """(t, max|dv|/h, max|dp|/h, x at the largest velocity jump) per step."""

    def __init__(self):
        self.t: List[float] = []
        self.dvdx_max: List[float] = []
        self.dpdx_max: List[float] = []
        self.x_argmax: List[float] = []

    def record(self, g: GridState):
        dv, dp, x = g.gradients()
        self.t.append(g.t)
        self.dvdx_max.append(dv)
        self.dpdx_max.append(dp)
        self.x_argmax.append(x)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def max_dvdx(self) -> float:
        return max(self.dvdx_max) if self.dvdx_max else 0.0

    def t_steepen(self, factor: float) -> Optional[float]:
        """First time max|dv|/h exceeds factor times its initial value."""
        if not self.dvdx_max or self.dvdx_max[0] <= 0.0:
            return None
        threshold = factor * self.dvdx_max[0]
        for t, g in zip(self.t, self.dvdx_max):
            if g > threshold:
                return t
        return None

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"t": t, "dvdx_max": dv, "dpdx_max": dp, "x_argmax": x}
            for t, dv, dp, x in zip(self.t, self.dvdx_max, self.dpdx_max, self.x_argmax)
        ]


class Snapshot:
    def __init__(self, g: GridState):
        rho, v, p = g.primitives()
        self.t: float = g.t
        self.x: np.ndarray = g.x.copy()
        self.rho: np.ndarray = rho
        self.v: np.ndarray = v
        self.p: np.ndarray = p
        self.S: np.ndarray = g.entropy()

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"x": float(x), "rho": float(r), "v": float(v), "p": float(p), "S": float(s)}
            for x, r, v, p, s in zip(self.x, self.rho, self.v, self.p, self.S)
        ]

    def __repr__(self) -> str:
        return f"Snapshot(t={self.t}, cells={len(self.x)})"


class SimulationResult:
    def __init__(self, initial: GridState, final: GridState, snapshots: List[Snapshot], history: GradientHistory, steepen_factor: float):
        self.initial: GridState = initial
        self.final: GridState = final
        self.snapshots: List[Snapshot] = snapshots
        self.history: GradientHistory = history
        self.t_steepen: Optional[float] = history.t_steepen(steepen_factor)
        self.breakdown: Optional[SimulationBreakdown] = None
        self.steps: int = 0

    @property
    def completed(self) -> bool:
        return self.breakdown is None

    @property
    def max_gradient(self) -> float:
        return self.history.max_dvdx

    def mass_drift(self) -> float:
        m0 = self.initial.mass()
        return abs(self.final.mass() - m0) / abs(m0)

    def momentum_drift(self) -> float:
        q0 = self.initial.momentum()
        scale = max(abs(q0), self.initial.mass())
        return abs(self.final.momentum() - q0) / scale

    def summary(self) -> Dict[str, object]:
        result = {
            "cells": self.initial.cells,
            "boundary": self.initial.boundary.value,
            "t_reached": self.final.t,
            "steps": self.steps,
            "completed": self.completed,
            "t_steepen": self.t_steepen,
            "initial_gradient": self.history.dvdx_max[0] if len(self.history) else 0.0,
            "max_gradient": self.max_gradient,
            "mass_drift": self.mass_drift(),
        }
        if self.breakdown is not None:
            result["breakdown"] = {
                "cell": self.breakdown.cell,
                "time": self.breakdown.time,
                "message": str(self.breakdown),
            }
        return result

    def __repr__(self) -> str:
        return (
            f"SimulationResult(cells={self.initial.cells}, t={self.final.t}, "
            f"t_steepen={self.t_steepen}, completed={self.completed})"
        )


def simulate(
    pr: Profile,
    gp: GasParams,
    t_end: Optional[float] = None,
    cells: Optional[int] = None,
    cfl: Optional[float] = None,
    fv: FVAdjustment = defaultFV,
) -> SimulationResult:
    """
    Run to t_end or breakdown, recording the gradient history every step and
    snapshots at the requested times (plus the initial and final states).

    A breakdown does not raise: the result keeps the partial history and the
    SimulationBreakdown describing the offending cell and time.
    """
    t_end = fv.t_end if t_end is None else t_end
    cells = fv.cells if cells is None else cells
    cfl = fv.cfl if cfl is None else cfl
    if not t_end > 0.0:
        raise DomainError(f"t_end must be positive, got {t_end}", field="t_end")
    if not 0.0 < cfl <= 0.5:
        raise DomainError(f"cfl must lie in (0, 0.5], got {cfl}", field="cfl")

    g = init_grid(pr, gp, cells, fv.boundary)
    initial = g
    history = GradientHistory()
    history.record(g)
    snapshots = [Snapshot(g)]
    stops = sorted(t for t in fv.snapshot_times if 0.0 < t < t_end) + [t_end]
    breakdown = None
    steps = 0
    for stop in stops:
        try:
            while g.t < stop:
                dt = min(stable_dt(g, cfl), stop - g.t)
                if dt <= 1e-14 * max(1.0, stop):
                    g = g.moved(g.U, stop)
                    break
                g = step(g, gp, cfl, dt)
                steps += 1
                history.record(g)
        except SimulationBreakdown as e:
            breakdown = e
            logger.warning(str(e))
        snapshots.append(Snapshot(g))
        if breakdown is not None:
            break

    result = SimulationResult(initial, g, snapshots, history, fv.steepen_factor)
    result.breakdown = breakdown
    result.steps = steps
    for snap in snapshots:
        logger.debug(f"snapshot t={snap.t!r}")
    logger.info(f"simulation finished: {result}")
    return result
