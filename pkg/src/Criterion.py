# Criterion.py
# Pointwise indicator fields and the smooth / blow-up dichotomy for Cauchy data.

import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.optimize import brentq

from .ConditionSet import ConditionFlags, ConditionSet
from .GasBasics import CriterionAdjustment, DomainError, defaultCriterion
from .GasState import GasParams
from .Profile import PointData, Profile, sample_arrays, sample_point
from .ProfileExpression import eval_d

logger = logging.getLogger(__name__)

INFINITE = math.inf  # K marker when the pressure slope vanishes

CATASTROPHE = "gradient-catastrophe"
HYPERBOLICITY_LOSS = "hyperbolicity-loss"


class Indicators:
    """
    R1 = v0', R2 = p0' / sqrt(gamma rho0 p0), K and b = K - (gamma-1)/2 at x.

    K is INFINITE (and b None) when p0' counts as zero; only the flat
    pressure set can then certify the point.
    """

    def __init__(
        self,
        R1: float,
        R2: float,
        K: float = INFINITE,
        b: Optional[float] = None,
        gamma: float = 1.4,
        x: float = 0.0,
    ):
        self.R1: float = float(R1)
        self.R2: float = float(R2)
        self.K: float = float(K)
        self.gamma: float = float(gamma)
        if b is None and not math.isinf(self.K):
            b = self.K - (self.gamma - 1.0) / 2.0
        self.b: Optional[float] = None if math.isinf(self.K) else float(b)
        self.x: float = float(x)

    @classmethod
    def with_b(cls, R1: float, R2: float, b: float, gamma: float = 1.4, x: float = 0.0) -> "Indicators":
        return cls(R1, R2, b + (gamma - 1.0) / 2.0, b, gamma, x)

    @property
    def k_infinite(self) -> bool:
        return math.isinf(self.K)

    def asDict(self) -> Dict[str, object]:
        return {
            "x": self.x,
            "R1": self.R1,
            "R2": self.R2,
            "K": "INFINITE" if self.k_infinite else self.K,
            "b": self.b,
        }

    def __repr__(self) -> str:
        K = "INFINITE" if self.k_infinite else self.K
        return f"Indicators(x={self.x}, R1={self.R1}, R2={self.R2}, K={K}, b={self.b}, gamma={self.gamma})"


class PointVerdict:
    def __init__(self, x: float, indicators: Indicators, sets: ConditionSet):
        self.x: float = float(x)
        self.indicators: Indicators = indicators
        self.sets: ConditionSet = sets

    @property
    def safe(self) -> bool:
        return self.sets.safe

    def asDict(self) -> Dict[str, object]:
        return {
            "x": self.x,
            "indicators": self.indicators.asDict(),
            "sets": self.sets.set_numbers(),
            "membership": self.sets.asDict(),
            "safe": self.safe,
        }

    def __repr__(self) -> str:
        return f"PointVerdict(x={self.x}, sets={self.sets}, safe={self.safe})"


class GlobalVerdict:
    """
    Verdict over the sampled window.

    The grid_meta record lists the refined safe/unsafe boundaries; a smooth
    verdict certifies the sampled and refined nodes of [a, b] only.
    """

    def __init__(
        self,
        points: List[PointVerdict],
        grid_meta: Dict[str, object],
        method: str = "general",
        label: str = CATASTROPHE,
    ):
        self.points: List[PointVerdict] = sorted(points, key=lambda pv: pv.x)
        self.witnesses: List[PointVerdict] = [pv for pv in self.points if not pv.safe]
        self.smooth: bool = not self.witnesses
        self.predicted_T: Optional[float] = None
        self.grid_meta: Dict[str, object] = grid_meta
        self.method: str = method
        self.label: str = label

    def set_predicted_T(self, T: Optional[float]):
        if T is None:
            self.predicted_T = None
            return
        if self.smooth:
            raise ValueError("a smooth verdict carries no catastrophe time")
        if not T > 0.0:
            raise ValueError(f"catastrophe time must be positive, got {T}")
        self.predicted_T = float(T)

    def safe_flags(self) -> List[bool]:
        return [pv.safe for pv in self.points]

    def asDict(self, with_points: bool = True) -> Dict[str, object]:
        result = {
            "smooth": self.smooth,
            "method": self.method,
            "label": self.label,
            "predicted_T": self.predicted_T,
            "witnesses": [pv.asDict() for pv in self.witnesses],
            "grid_meta": self.grid_meta,
        }
        if with_points:
            result["points"] = [pv.asDict() for pv in self.points]
        return result

    def __repr__(self) -> str:
        return (
            f"GlobalVerdict(smooth={self.smooth}, witnesses={len(self.witnesses)}, "
            f"nodes={len(self.points)}, predicted_T={self.predicted_T}, label={self.label})"
        )


def dp_is_zero(dp0: float, p0: float, adj: CriterionAdjustment = defaultCriterion) -> bool:
    return abs(dp0) <= adj.eps_zero * max(1.0, abs(p0))


def point_indicators(pd: PointData, gp: GasParams, adj: CriterionAdjustment = defaultCriterion) -> Indicators:
    pd.state.check(gp)
    if dp_is_zero(pd.dp0, pd.p0, adj):
        return Indicators(pd.dv0, 0.0, INFINITE, None, gp.gamma, pd.x)
    R2 = pd.dp0 / math.sqrt(gp.gamma * pd.rho0 * pd.p0)
    K = gp.gamma * pd.p0 * pd.drho0 / (2.0 * pd.rho0 * pd.dp0) - 0.5
    return Indicators(pd.dv0, R2, K, None, gp.gamma, pd.x)


def safety_sets(ind: Indicators, tol: float) -> ConditionSet:
    """
    Membership in the four condition sets, gamma >= 1.

    Non-strict inequalities hold within tol, strict ones need a margin of
    tol; R2 counts as zero when |R2| <= tol. Set 3 is evaluated as
    R1 >= sqrt(-2b/(gamma-1)) |R2|, which is the quadratic condition once
    R1 >= 0. At gamma = 1 set 3 shrinks to R2 = 0 and R1 >= 0.
    """
    sets = ConditionSet()
    R1, R2, b, gamma = ind.R1, ind.R2, ind.b, ind.gamma
    r1_nonneg = R1 >= -tol
    r2_zero = ind.k_infinite or abs(R2) <= tol
    if r2_zero and r1_nonneg:
        sets.insert(ConditionFlags.flat_pressure)
    if ind.k_infinite:
        return sets
    if b >= -tol and r1_nonneg:
        sets.insert(ConditionFlags.expanding)
    if b > tol and not r2_zero:
        sets.insert(ConditionFlags.pressure_driven)
    if b < -tol and r1_nonneg:
        if gamma == 1.0:
            inside = r2_zero
        else:
            inside = R1 - math.sqrt(-2.0 * b / (gamma - 1.0)) * abs(R2) >= -tol
        if inside:
            sets.insert(ConditionFlags.level_set)
    return sets


def chaplygin_sets(ind: Indicators, tol: float) -> ConditionSet:
    """Strict hyperbolicity is kept while R1 >= -|R2| (equality is safe)."""
    sets = ConditionSet()
    if ind.R1 + abs(ind.R2) >= -tol:
        sets.insert(ConditionFlags.hyperbolic)
    return sets


def classify_point(ind: Indicators, tol: Optional[float] = None, adj: CriterionAdjustment = defaultCriterion) -> PointVerdict:
    """
    Raises:
        DomainError: gamma < 1 other than the Chaplygin value -1.
    """
    tol = adj.tolerance if tol is None else tol
    if ind.gamma == -1.0:
        return PointVerdict(ind.x, ind, chaplygin_sets(ind, tol))
    if ind.gamma < 1.0:
        raise DomainError(f"the smoothness criterion needs gamma >= 1, got {ind.gamma}", field="gamma")
    return PointVerdict(ind.x, ind, safety_sets(ind, tol))


# ----------------------------------------------------------------------
#                         PROFILE CLASSIFICATION
# ----------------------------------------------------------------------


def _scan(
    pr: Profile,
    gp: GasParams,
    adj: CriterionAdjustment,
    grid: Optional[Sequence[float]],
    verdict_at: Callable[[PointData], PointVerdict],
    method: str,
    label: str,
) -> GlobalVerdict:
    grid = pr.uniform_grid(adj.nodes) if grid is None else np.asarray(grid, dtype=float)
    sample = sample_arrays(pr, grid, gp)
    base = [verdict_at(pd) for pd in sample.points()]

    min_spacing = pr.length * adj.refine_fraction
    refined: List[PointVerdict] = []
    boundaries: List[Tuple[float, float]] = []
    truncated = False
    for left, right in zip(base, base[1:]):
        if left.safe == right.safe:
            continue
        if len(boundaries) >= adj.max_refinements:
            truncated = True
            continue
        lo, hi = left, right
        while hi.x - lo.x >= min_spacing:
            mid = verdict_at(sample_point(pr, 0.5 * (lo.x + hi.x), gp))
            refined.append(mid)
            if mid.safe == lo.safe:
                lo = mid
            else:
                hi = mid
        boundaries.append((lo.x, hi.x))
        logger.info(f"{method}: safe/unsafe boundary refined to [{lo.x!r}, {hi.x!r}]")
    if truncated:
        logger.warning(f"{method}: more than {adj.max_refinements} boundaries, the rest left unrefined")

    grid_meta = {
        "domain": [pr.a, pr.b],
        "nodes": int(len(grid)),
        "refined_nodes": len(refined),
        "min_spacing": min_spacing,
        "boundaries": [list(bd) for bd in boundaries],
        "truncated": truncated,
        "caveat": "verdict covers the sampled and refined nodes of the window only",
    }
    verdict = GlobalVerdict(base + refined, grid_meta, method, label)
    logger.info(f"{method}: {verdict}")
    return verdict


def classify_profile(
    pr: Profile,
    gp: GasParams,
    grid_spec: CriterionAdjustment = defaultCriterion,
    grid: Optional[Sequence[float]] = None,
) -> GlobalVerdict:
    """
    Classify every grid node, refine between nodes whose verdicts differ and
    collect the unsafe nodes as witnesses.

    With gamma = -1 the profile is handed to classify_chaplygin.

    Raises:
        DomainError: positivity violation, grid outside the window, or
            gamma < 1 other than -1.
        EvaluationError: domain fault inside a profile expression.
    """
    if gp.chaplygin:
        return classify_chaplygin(pr, grid_spec, grid)
    if gp.gamma < 1.0:
        raise DomainError(f"the smoothness criterion needs gamma >= 1, got {gp.gamma}", field="gamma")

    def verdict_at(pd: PointData) -> PointVerdict:
        return classify_point(point_indicators(pd, gp, grid_spec), grid_spec.tolerance, grid_spec)

    return _scan(pr, gp, grid_spec, grid, verdict_at, "general", CATASTROPHE)


def classify_isentropic(
    pr: Profile,
    gp: GasParams,
    grid_spec: CriterionAdjustment = defaultCriterion,
    grid: Optional[Sequence[float]] = None,
) -> GlobalVerdict:
    """
    Isentropic test v0' >= rho0^((gamma-3)/2) |rho0'|, gamma > 1.

    The profile's own pressure is replaced by rho0^gamma / gamma. The density
    weight is dropped where the resulting pressure slope counts as zero,
    matching the flat-pressure routing of classify_profile.
    """
    if not gp.gamma > 1.0:
        raise DomainError(f"the isentropic test needs gamma > 1, got {gp.gamma}", field="gamma")
    b = -(gp.gamma - 1.0) / 2.0
    tol = grid_spec.tolerance

    def verdict_at(pd: PointData) -> PointVerdict:
        sets = ConditionSet()
        if dp_is_zero(pd.dp0, pd.p0, grid_spec):
            ind = Indicators(pd.dv0, 0.0, INFINITE, None, gp.gamma, pd.x)
            if pd.dv0 >= -tol:
                sets.insert(ConditionFlags.flat_pressure)
            return PointVerdict(pd.x, ind, sets)
        weight = pd.rho0 ** ((gp.gamma - 3.0) / 2.0)
        ind = Indicators(pd.dv0, weight * pd.drho0, 0.0, b, gp.gamma, pd.x)
        if pd.dv0 >= -tol and pd.dv0 - weight * abs(pd.drho0) >= -tol:
            sets.insert(ConditionFlags.level_set)
        return PointVerdict(pd.x, ind, sets)

    return _scan(pr.isentropic(gp), gp, grid_spec, grid, verdict_at, "isentropic", CATASTROPHE)


def classify_chaplygin(
    pr: Profile,
    grid_spec: CriterionAdjustment = defaultCriterion,
    grid: Optional[Sequence[float]] = None,
) -> GlobalVerdict:
    """
    Chaplygin gas (gamma = -1, p0 = -1/rho0): unsafe where R1 < -|R2|.

    An unsafe verdict signals loss of strict hyperbolicity and is labeled
    accordingly in reports.
    """
    gp = GasParams(-1.0)

    def verdict_at(pd: PointData) -> PointVerdict:
        ind = point_indicators(pd, gp, grid_spec)
        return PointVerdict(pd.x, ind, chaplygin_sets(ind, grid_spec.tolerance))

    return _scan(pr.isentropic(gp), gp, grid_spec, grid, verdict_at, "chaplygin", HYPERBOLICITY_LOSS)


# ----------------------------------------------------------------------
#                         ENTROPY-BASED FORMS
# ----------------------------------------------------------------------


def entropy_slope(pd: PointData, gp: GasParams) -> float:
    """S0' for S = ln(gamma p / rho^gamma)."""
    return pd.dp0 / pd.p0 - gp.gamma * pd.drho0 / pd.rho0


def entropy_form_K(pd: PointData, gp: GasParams, adj: CriterionAdjustment = defaultCriterion) -> Optional[float]:
    """
    -(1/2) S0' / (rho0^(gamma+1) (ln p0)'), for cross-reporting.

    This form differs from the K used by the classifier by the factor
    rho0^-(gamma+1); same sign, different magnitude. None when (ln p0)'
    vanishes.
    """
    logger.debug(f"entropy-form K at x={pd.x!r}")
    if dp_is_zero(pd.dp0, pd.p0, adj):
        return None
    dlnp = pd.dp0 / pd.p0
    return -0.5 * entropy_slope(pd, gp) / (pd.rho0 ** (gp.gamma + 1.0) * dlnp)


def entropy_monotone_sufficient(pd: PointData, gp: GasParams, adj: CriterionAdjustment = defaultCriterion) -> bool:
    """
    S0' / (ln p0)' < -(gamma - 1), i.e. b > 0 read through the entropy.

    Together with p0' != 0 this places the point in the pressure-driven set.
    """
    if dp_is_zero(pd.dp0, pd.p0, adj):
        return False
    ratio = entropy_slope(pd, gp) / (pd.dp0 / pd.p0)
    return ratio < -(gp.gamma - 1.0) - 2.0 * adj.tolerance


# ----------------------------------------------------------------------
#                           PRESSURE EXTREMA
# ----------------------------------------------------------------------


class PressureExtremum:
    """A sign change of p0'. There R2 = 0 and the point is safe only if R1 >= 0."""

    def __init__(self, x: float, r1: float, kind: str):
        self.x: float = float(x)
        self.r1: float = float(r1)
        self.kind: str = kind  # "max" | "min"

    @property
    def generates_singularity(self) -> bool:
        return self.r1 < 0.0

    def asDict(self) -> Dict[str, object]:
        return {
            "x": self.x,
            "kind": self.kind,
            "r1": self.r1,
            "generates_singularity": self.generates_singularity,
        }

    def __repr__(self) -> str:
        return f"PressureExtremum(x={self.x}, kind={self.kind}, r1={self.r1})"


def pressure_extrema(
    pr: Profile,
    gp: GasParams,
    grid: Optional[Sequence[float]] = None,
    adj: CriterionAdjustment = defaultCriterion,
) -> List[PressureExtremum]:
    """Locate the interior sign changes of p0' on the grid and polish them with brentq."""
    grid = pr.uniform_grid(adj.nodes) if grid is None else np.asarray(grid, dtype=float)
    sample = sample_arrays(pr, grid, gp)
    dp = sample.dp0

    def slope(x: float) -> float:
        return eval_d(pr.p0, x)[1]

    extrema: List[PressureExtremum] = []
    for i in range(len(grid) - 1):
        if dp[i] == 0.0 and 0 < i and dp[i - 1] * dp[i + 1] < 0.0:
            x = float(grid[i])
        elif dp[i] * dp[i + 1] < 0.0:
            x = brentq(slope, grid[i], grid[i + 1], xtol=pr.length * adj.refine_fraction * 1e-3)
        else:
            continue
        rising = dp[i] > 0.0 or (dp[i] == 0.0 and dp[i - 1] > 0.0)
        kind = "max" if rising else "min"
        extrema.append(PressureExtremum(x, eval_d(pr.v0, x)[1], kind))
    return extrema
