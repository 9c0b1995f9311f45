# RiemannODE.py
# Integration of the Riemann-slope systems, blow-up times and phase portraits.

import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.integrate import quad, solve_ivp

from .GasBasics import DomainError, ODEAdjustment, Outcome, defaultODE
from .GasState import GasParams
from .RiemannSlopes import (
    FirstIntegral,
    PVector,
    RayState,
    RState,
    reduce_to_R,
    rhs_augmented_ray,
    rhs_P,
    rhs_R,
)

logger = logging.getLogger(__name__)

R_COLUMNS = ("R1", "R2")
P_COLUMNS = ("P1", "P2", "P3")
RAY_COLUMNS = ("u1", "u2", "u3", "P1", "P2", "P3")


class Trajectory:
    """
    Sampled solution of one slope system.

    States are stored row-wise in `states` with column names `columns`;
    kind is "R" (reduced pair), "P" (three slopes) or "ray" (state plus
    slopes). Backward runs are stored in reversed time, so `times` always
    increases.
    """

    def __init__(
        self,
        times: np.ndarray,
        states: np.ndarray,
        columns: Sequence[str],
        outcome: Outcome,
        gamma: float,
        b: Optional[float] = None,
        kind: str = "R",
        direction: int = 1,
    ):
        self.times: np.ndarray = np.asarray(times, dtype=float)
        self.states: np.ndarray = np.asarray(states, dtype=float).reshape(len(self.times), len(columns))
        self.columns: Tuple[str, ...] = tuple(columns)
        self.outcome: Outcome = outcome
        self.gamma: float = float(gamma)
        self.b: Optional[float] = b
        self.kind: str = kind
        self.direction: int = direction
        self.c_drift: float = 0.0
        self.k_drift: Optional[float] = None
        self.T: Optional[float] = None
        self.bracket: Optional[Tuple[float, float]] = None
        self.low_confidence: bool = False
        self.threshold_exceeded: bool = False
        self.diagnostics: Dict[str, object] = {}

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def column(self, name: str) -> np.ndarray:
        return self.states[:, self.columns.index(name)]

    @property
    def slopes(self) -> np.ndarray:
        """The columns that blow up: (R1, R2) or (P1, P2, P3)."""
        if self.kind == "R":
            return self.states
        return self.states[:, -3:]

    @property
    def R1(self) -> np.ndarray:
        if self.kind == "R":
            return self.states[:, 0]
        return 0.5 * (self.column("P1") + self.column("P3"))

    @property
    def R2(self) -> np.ndarray:
        if self.kind == "R":
            return self.states[:, 1]
        return 0.5 * (self.column("P3") - self.column("P1"))

    @property
    def riccati(self) -> bool:
        """R2 frozen: identically zero, or constant for gamma = -1."""
        return self.kind == "R" and (self.states[0, 1] == 0.0 or self.gamma == -1.0)

    def C_values(self) -> Optional[np.ndarray]:
        if self.b is None:
            return None
        return FirstIntegral(self.b, self.gamma).values(self.R1, self.R2)

    def escaped(self) -> bool:
        return self.outcome != Outcome.bounded

    def rows(self) -> List[Dict[str, float]]:
        """One record per sample: t, R1, R2, the native columns and C."""
        C = self.C_values()
        R1, R2 = self.R1, self.R2
        result = []
        for i, t in enumerate(self.times):
            row = {"t": float(t), "R1": float(R1[i]), "R2": float(R2[i])}
            if self.kind != "R":
                row.update({name: float(self.states[i, j]) for j, name in enumerate(self.columns)})
            row["C"] = None if C is None or not np.isfinite(C[i]) else float(C[i])
            result.append(row)
        return result

    def summary(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "direction": self.direction,
            "outcome": self.outcome.value,
            "t_end": self.t_end,
            "samples": int(len(self.times)),
            "initial": [float(v) for v in self.states[0]],
            "final": [float(v) for v in self.final],
            "c_drift": self.c_drift,
            "k_drift": self.k_drift,
            "T": self.T,
            "bracket": None if self.bracket is None else [self.bracket[0], self.bracket[1]],
            "low_confidence": self.low_confidence,
            "threshold_exceeded": self.threshold_exceeded,
        }

    def __repr__(self) -> str:
        return (
            f"Trajectory(kind={self.kind}, outcome={self.outcome.value}, t_end={self.t_end}, "
            f"samples={len(self.times)}, T={self.T})"
        )


# ----------------------------------------------------------------------
#                              INTEGRATION
# ----------------------------------------------------------------------


def _run(
    fun: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_max: float,
    ode: ODEAdjustment,
    slope_slice: slice,
    columns: Sequence[str],
    gamma: float,
    b: Optional[float],
    kind: str,
    direction: int = 1,
    t_eval: Optional[Sequence[float]] = None,
) -> Trajectory:
    if not t_max > 0.0:
        raise DomainError(f"t_max must be positive, got {t_max}", field="t_max")
    if not (ode.rtol > 0.0 and ode.atol > 0.0):
        raise DomainError(f"tolerances must be positive, got rtol={ode.rtol}, atol={ode.atol}", field="tol")

    field = fun if direction > 0 else (lambda t, y: -fun(t, y))

    def escape(t, y):
        return float(np.linalg.norm(y[slope_slice])) - ode.escape

    escape.terminal = True
    escape.direction = 1.0

    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(
            field,
            (0.0, t_max),
            np.asarray(y0, dtype=float),
            method=ode.method,
            rtol=ode.rtol,
            atol=ode.atol,
            events=escape,
            t_eval=t_eval,
        )

    steps = np.diff(sol.t)
    diagnostics = {
        "method": ode.method,
        "success": bool(sol.success),
        "status": int(sol.status),
        "message": sol.message,
        "nfev": int(sol.nfev),
        "num_steps": int(len(sol.t)),
        "min_step": float(steps.min()) if len(steps) else None,
        "max_step": float(steps.max()) if len(steps) else None,
    }
    logger.debug(f"{kind} integration: {diagnostics}")

    times, states = sol.t, sol.y.T
    finite = np.all(np.isfinite(states), axis=1)
    if not np.all(finite):
        keep = np.argmin(finite)
        times, states = times[:keep], states[:keep]

    if sol.status == 1:
        outcome = Outcome.escaped
    elif sol.status == 0:
        outcome = Outcome.bounded
    else:
        start = float(np.linalg.norm(np.asarray(y0)[slope_slice]))
        end = float(np.linalg.norm(states[-1][slope_slice])) if len(states) else 0.0
        if len(states) < 2 or end < 1e3 * max(start, 1.0):
            raise DomainError(
                f"{kind} integration failed at t={times[-1] if len(times) else 0.0}: {sol.message}",
                field="state",
            )
        logger.info(f"{kind} integration gave up near a singularity: {sol.message}")
        outcome = Outcome.blowup

    traj = Trajectory(times, states, columns, outcome, gamma, b, kind, direction)
    traj.diagnostics = diagnostics
    if outcome != Outcome.bounded:
        blowup_time_estimate(traj, ode)
    return traj


def _relative_drift(values: np.ndarray) -> float:
    values = values[np.isfinite(values)]
    if len(values) == 0:
        return 0.0
    scale = abs(values[0]) if values[0] != 0.0 else 1.0
    return float(np.max(np.abs(values - values[0])) / scale)


def integrate(
    R0: RState,
    t_max: Optional[float] = None,
    tol: Optional[float] = None,
    ode: ODEAdjustment = defaultODE,
    direction: int = 1,
    t_eval: Optional[Sequence[float]] = None,
) -> Trajectory:
    """
    Integrate the reduced system from R0 until t_max or escape.

    Args:
        R0: Initial slopes with b and gamma.
        t_max: End time, ode.t_max by default.
        tol: Relative tolerance; the absolute one is set two decades lower.
        direction: -1 integrates the time-reversed field.
        t_eval: Output times inside [0, t_max]; the solver steps adaptively
            either way.

    Returns:
        Trajectory with outcome Bounded, Escaped or BlowUpEstimated, and the
        relative drift of the first integral when R2(0) != 0.
    """
    if tol is not None:
        if not tol > 0.0:
            raise DomainError(f"tol must be positive, got {tol}", field="tol")
        ode = ode.with_tol(tol)
    t_max = ode.t_max if t_max is None else t_max

    def field(t, y):
        return np.array(rhs_R(R0.moved(y[0], y[1])))

    traj = _run(field, R0.as_array(), t_max, ode, slice(0, 2), R_COLUMNS, R0.gamma, R0.b, "R", direction, t_eval)
    fi = FirstIntegral.of(R0)
    if traj.escaped() and fi.bounded_loop(R0):
        peak = fi.loop_peak(R0)
        if peak >= ode.escape:
            # the loop is bounded by the first integral, it only peaks above the threshold
            logger.warning(f"loop from {R0} peaks at {peak!r}, above the escape threshold {ode.escape!r}")
            traj.outcome = Outcome.bounded
            traj.T, traj.bracket = None, None
            traj.threshold_exceeded = True
            traj.low_confidence = True
    C = traj.C_values()
    if C is not None and R0.R2 != 0.0:
        traj.c_drift = _relative_drift(C)
    return traj


def integrate_P(
    P0: PVector,
    gp: GasParams,
    t_max: Optional[float] = None,
    ode: ODEAdjustment = defaultODE,
    t_eval: Optional[Sequence[float]] = None,
) -> Trajectory:
    """Integrate the three slope equations; k_drift reports how far P2/(P1-P3) moved."""
    t_max = ode.t_max if t_max is None else t_max

    def field(t, y):
        return rhs_P(PVector.from_array(y), gp).as_array()

    R1, R2, K = reduce_to_R(P0)
    b = None if K is None or math.isinf(K) else K - 0.5 * (gp.gamma - 1.0)
    traj = _run(field, P0.as_array(), t_max, ode, slice(0, 3), P_COLUMNS, gp.gamma, b, "P", t_eval=t_eval)
    if b is not None:
        gap = traj.column("P1") - traj.column("P3")
        with np.errstate(divide="ignore", invalid="ignore"):
            k = traj.column("P2") / gap
        traj.k_drift = _relative_drift(np.where(gap != 0.0, k, np.nan))
        traj.c_drift = _relative_drift(traj.C_values()) if R2 != 0.0 else 0.0
    return traj


def integrate_ray(
    s0: RayState,
    gp: GasParams,
    t_max: Optional[float] = None,
    ode: ODEAdjustment = defaultODE,
    t_eval: Optional[Sequence[float]] = None,
) -> Trajectory:
    """
    Integrate (u1, u2, u3, P1, P2, P3) along a ray; escape is measured on the
    slopes only.

    Raises:
        DomainError: invalid initial state, or the state left u2 > 0,
            gamma u3 > 0 without the slopes blowing up.
    """
    rhs_augmented_ray(s0, gp)

    def field(t, y):
        with np.errstate(invalid="ignore"):
            s = RayState.from_array(y)
            if not (s.u2 > 0.0 and gp.gamma * s.u3 > 0.0):
                return np.full(6, np.nan)
            return rhs_augmented_ray(s, gp).as_array()

    t_max = ode.t_max if t_max is None else t_max
    R1, R2, K = reduce_to_R(s0.P)
    b = None if K is None or math.isinf(K) else K - 0.5 * (gp.gamma - 1.0)
    traj = _run(field, s0.as_array(), t_max, ode, slice(3, 6), RAY_COLUMNS, gp.gamma, b, "ray", t_eval=t_eval)
    if b is not None and R2 != 0.0:
        traj.c_drift = _relative_drift(traj.C_values())
    return traj


# ----------------------------------------------------------------------
#                             BLOW-UP TIMES
# ----------------------------------------------------------------------


def blowup_time_estimate(traj: Trajectory, ode: ODEAdjustment = defaultODE) -> Tuple[float, Tuple[float, float]]:
    """
    Extrapolate the blow-up time from the escape tail.

    Near a catastrophe the dominant component grows like 1/(T - t), so
    1/|m(t)| is regressed against t over the last decade of growth and its
    root is T. On the Riccati branch the exact form T = t - 1/R1(t) is used
    at the last sample. Too few tail samples widen the bracket and set
    low_confidence.

    Returns:
        (T, (t_last, T_upper)); the same values are stored on traj.
    """
    if traj.outcome == Outcome.bounded:
        raise ValueError("blow-up time requested for a bounded trajectory")
    t = traj.times
    t_last = float(t[-1])
    slopes = np.abs(traj.slopes)
    j = int(np.argmax(slopes[-1]))
    m = slopes[:, j]

    if traj.riccati:
        T = t_last + 1.0 / m[-1]
        traj.T, traj.bracket = T, (t_last, T)
        return traj.T, traj.bracket

    below = np.nonzero(m < m[-1] / ode.tail_decade)[0]
    first = int(below[-1]) + 1 if len(below) else 0
    tt = t[first:] - t_last
    yy = 1.0 / m[first:]

    if len(tt) >= 4:
        slope, intercept = np.polyfit(tt, yy, 1)
        half = len(tt) // 2
        s_early = np.polyfit(tt[:half + 1], yy[:half + 1], 1)[0]
        s_late = np.polyfit(tt[half:], yy[half:], 1)[0]
        if slope < 0.0:
            T = t_last + max(-intercept / slope, 0.0)
            s_min = min(abs(slope), abs(s_early), abs(s_late))
            upper = max(t_last + yy[-1] / s_min, T) if s_min > 0.0 else T + (T - t_last)
            traj.T, traj.bracket = T, (t_last, upper)
            return traj.T, traj.bracket

    traj.low_confidence = True
    if len(tt) >= 2 and yy[-1] < yy[-2]:
        rate = (yy[-2] - yy[-1]) / (tt[-1] - tt[-2])
        T = t_last + yy[-1] / rate
        upper = t_last + 10.0 * yy[-1] / rate
    else:
        T = t_last
        upper = t_last + max(t_last - float(t[first]), yy[-1])
    logger.warning(f"blow-up tail has {len(tt)} samples, estimate T={T!r} is low-confidence")
    traj.T, traj.bracket = T, (t_last, upper)
    return traj.T, traj.bracket


def _turning_point(fi: FirstIntegral, C: float) -> float:
    """|R2| where R1 crosses zero on the level set C (b < 0)."""
    if fi.isothermal:
        return math.exp(C / (2.0 * fi.b))
    return (C / fi.coefficient) ** (1.0 / (2.0 - fi.exponent))


def quadrature_blowup_time(R: RState) -> Optional[float]:
    """
    Blow-up time by quadrature along the level set, None if R never blows up.

    On the level set dt = d|R2| / (((gamma+1)/2) |R1| |R2|); a state with
    R1 >= 0 that is not safe first runs down to the turning point where R1
    vanishes and then escapes with R1 < 0. The substitution
    |R2| = y_turn + w^2 removes the square-root singularity there.

    Raises:
        DomainError: gamma < 1 other than -1.
    """
    if R.gamma == -1.0:
        return chaplygin_solve(R.R1, R.R2, R.b - 1.0).T
    if R.R2 == 0.0 or R.b > 0.0:
        if R.R2 == 0.0 and R.R1 < 0.0:
            return 1.0 / abs(R.R1)
        return None
    if R.gamma < 1.0:
        raise DomainError(f"quadrature needs gamma >= 1, got {R.gamma}", field="gamma")

    fi = FirstIntegral.of(R)
    C = fi.value(R.R1, R.R2)
    k = 0.5 * (R.gamma + 1.0)
    y0 = abs(R.R2)

    def rate(y: float) -> float:
        g = fi.r1_squared(C, y)
        return 1.0 / (k * y * math.sqrt(g)) if g > 0.0 else 0.0

    def shifted(y_turn: float) -> Callable[[float], float]:
        return lambda w: 2.0 * w * rate(y_turn + w * w)

    options = {"epsabs": 1e-14, "epsrel": 1e-12, "limit": 400}
    if R.R1 < 0.0:
        return quad(rate, y0, math.inf, **options)[0]
    turns = R.b < 0.0 and (fi.isothermal or C < 0.0)
    if not turns:
        return None
    y_turn = min(_turning_point(fi, C), y0)
    run_down = quad(shifted(y_turn), 0.0, math.sqrt(y0 - y_turn), **options)[0]
    escape = quad(shifted(y_turn), 0.0, math.inf, **options)[0]
    return run_down + escape


class ChaplyginOutcome:
    """
    Constant-coefficient Riccati solution dR1/dt = -R1^2 + b R2^2, R2 frozen.
    """

    def __init__(self, R1_0: float, R2_0: float, b: float):
        self.R1_0: float = float(R1_0)
        self.R2_0: float = float(R2_0)
        self.b: float = float(b)
        self.T: Optional[float] = self._blowup_time()

    @property
    def blows_up(self) -> bool:
        return self.T is not None

    @property
    def outcome(self) -> Outcome:
        return Outcome.blowup if self.blows_up else Outcome.bounded

    def _blowup_time(self) -> Optional[float]:
        r, b = self.R1_0, self.b
        if b > 0.0 and self.R2_0 != 0.0:
            beta = math.sqrt(b) * abs(self.R2_0)
            if r < -beta:
                return math.atanh(beta / abs(r)) / beta
            return None
        if b < 0.0 and self.R2_0 != 0.0:
            omega = math.sqrt(-b) * abs(self.R2_0)
            return (math.atan(r / omega) + 0.5 * math.pi) / omega
        return 1.0 / abs(r) if r < 0.0 else None

    def r1(self, t: float) -> float:
        """Closed-form R1(t) for t below the blow-up time."""
        r, b = self.R1_0, self.b
        if b > 0.0 and self.R2_0 != 0.0:
            beta = math.sqrt(b) * abs(self.R2_0)
            th = math.tanh(beta * t)
            return beta * (r + beta * th) / (beta + r * th)
        if b < 0.0 and self.R2_0 != 0.0:
            omega = math.sqrt(-b) * abs(self.R2_0)
            return omega * math.tan(math.atan(r / omega) - omega * t)
        return r / (1.0 + r * t)

    def asDict(self) -> Dict[str, object]:
        return {
            "R1": self.R1_0,
            "R2": self.R2_0,
            "b": self.b,
            "outcome": self.outcome.value,
            "T": self.T,
        }

    def __repr__(self) -> str:
        return f"ChaplyginOutcome(R1={self.R1_0}, R2={self.R2_0}, b={self.b}, T={self.T})"


def chaplygin_solve(R1_0: float, R2_0: float, K0: float = 0.0) -> ChaplyginOutcome:
    """
    Chaplygin gas along a ray: R2 is conserved and b = 1 + K0.

    For b > 0 blow-up happens iff R1_0 < -sqrt(b)|R2_0|, with
    T = artanh(sqrt(b)|R2_0| / |R1_0|) / (sqrt(b)|R2_0|). For b < 0 every
    state blows up at T = (arctan(R1_0/w) + pi/2)/w, w = sqrt(-b)|R2_0|.
    With b = 0 or R2_0 = 0 the plain Riccati time 1/|R1_0| applies.
    """
    return ChaplyginOutcome(R1_0, R2_0, 1.0 + K0)


def witness_blowup_time(R: RState, ode: ODEAdjustment = defaultODE) -> Optional[float]:
    """
    Blow-up time from one unsafe state: closed forms where they exist,
    quadrature for b <= 0, the integrator with tail fit otherwise.
    """
    if R.gamma == -1.0 or R.R2 == 0.0:
        return quadrature_blowup_time(R)
    if R.b <= 0.0 and R.gamma >= 1.0:
        return quadrature_blowup_time(R)
    traj = integrate(R, ode=ode)
    return traj.T if traj.escaped() else None


def predict_catastrophe_time(verdict, gp: GasParams, ode: ODEAdjustment = defaultODE) -> Optional[float]:
    """
    Minimum blow-up time over the verdict's witnesses; stored on the verdict.

    A witness whose pressure slope vanished follows the Riccati branch.
    Identical witness states are solved once.
    """
    if verdict.smooth:
        return None
    cache: Dict[Tuple[float, float, float], Optional[float]] = {}
    best: Optional[float] = None
    for pv in verdict.witnesses:
        ind = pv.indicators
        if gp.chaplygin:
            b = 1.0 + (0.0 if ind.k_infinite else ind.K)
            R = RState(ind.R1, 0.0 if ind.k_infinite else ind.R2, b, -1.0)
        elif ind.k_infinite or ind.R2 == 0.0:
            R = RState(ind.R1, 0.0, 0.0, gp.gamma)
        else:
            R = RState(ind.R1, ind.R2, ind.b, gp.gamma)
        key = (R.R1, R.R2, R.b)
        if key not in cache:
            cache[key] = witness_blowup_time(R, ode)
        T = cache[key]
        if T is not None and T > 0.0 and (best is None or T < best):
            best = T
    verdict.set_predicted_T(best)
    logger.info(f"predicted catastrophe time {best!r} from {len(cache)} distinct witness states")
    return best


# ----------------------------------------------------------------------
#                            PHASE PORTRAITS
# ----------------------------------------------------------------------


class PhaseCurve:
    """Forward and backward runs from one portrait seed."""

    def __init__(self, seed: Tuple[float, float], b: float, gamma: float):
        self.seed: Tuple[float, float] = (float(seed[0]), float(seed[1]))
        self.b: float = b
        self.gamma: float = gamma
        self.forward: Optional[Trajectory] = None
        self.backward: Optional[Trajectory] = None
        self.error: Optional[str] = None

    @property
    def outcome(self) -> Optional[Outcome]:
        return None if self.forward is None else self.forward.outcome

    @property
    def C(self) -> Optional[float]:
        return FirstIntegral(self.b, self.gamma).value(*self.seed)

    @property
    def loop(self) -> bool:
        """A bounded loop through the origin: b > 0, R2 != 0, both runs bounded."""
        return (
            self.b > 0.0
            and self.seed[1] != 0.0
            and self.forward is not None
            and self.backward is not None
            and self.forward.outcome == Outcome.bounded
            and self.backward.outcome == Outcome.bounded
        )

    def polyline(self) -> List[Tuple[float, float]]:
        """Backward branch reversed, then the forward branch, as (R1, R2) points."""
        points: List[Tuple[float, float]] = []
        if self.backward is not None:
            points.extend((float(r1), float(r2)) for r1, r2 in self.backward.states[:0:-1])
        if self.forward is not None:
            points.extend((float(r1), float(r2)) for r1, r2 in self.forward.states)
        return points

    def asDict(self) -> Dict[str, object]:
        return {
            "seed": list(self.seed),
            "outcome": None if self.outcome is None else self.outcome.value,
            "C": self.C,
            "loop": self.loop,
            "error": self.error,
        }

    def __repr__(self) -> str:
        return f"PhaseCurve(seed={self.seed}, outcome={self.outcome}, loop={self.loop}, error={self.error})"


def circle_seeds(n: int, radius: float = 1.0) -> List[Tuple[float, float]]:
    """n seeds on a circle, offset by half a step so none lies on R2 = 0."""
    angles = 2.0 * math.pi * (np.arange(n) + 0.5) / n
    return [(radius * math.cos(a), radius * math.sin(a)) for a in angles]


def grid_seeds(r1_range: Tuple[float, float], r2_range: Tuple[float, float], n1: int, n2: int) -> List[Tuple[float, float]]:
    return [(float(r1), float(r2)) for r1 in np.linspace(*r1_range, n1) for r2 in np.linspace(*r2_range, n2)]


def separatrix_seed(b: float, gamma: float, R2: float = 1.0) -> Tuple[float, float]:
    """The point with R1 > 0 on C = 0 for b < 0 and gamma > 1."""
    return (math.sqrt(-2.0 * b / (gamma - 1.0)) * abs(R2), R2)


def phase_portrait(
    b: float,
    gp: GasParams,
    seeds: Sequence[Tuple[float, float]],
    t_max: Optional[float] = None,
    ode: ODEAdjustment = defaultODE,
) -> List[PhaseCurve]:
    """
    Integrate every seed forward, and backward when the forward run stays
    bounded. A failing seed keeps its error message and the portrait goes on.
    """
    curves: List[PhaseCurve] = []
    for seed in seeds:
        curve = PhaseCurve(seed, b, gp.gamma)
        try:
            R0 = RState(seed[0], seed[1], b, gp.gamma)
            curve.forward = integrate(R0, t_max, ode=ode)
            if curve.forward.outcome == Outcome.bounded:
                curve.backward = integrate(R0, t_max, ode=ode, direction=-1)
        except Exception as e:
            curve.error = str(e)
            logger.warning(f"portrait seed {seed} failed: {e}")
        curves.append(curve)
    return curves
