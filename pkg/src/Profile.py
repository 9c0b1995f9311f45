# Profile.py

from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from .GasBasics import DomainError, EvaluationError
from .GasState import GasParams, PrimitiveState
from .ProfileExpression import (
    Expr,
    parse,
    eval_d,
    isentropic_pressure_expr,
    chaplygin_pressure_expr,
)

logger = logging.getLogger(__name__)

PI = "3.141592653589793"


class Profile:
    """
    Cauchy data (v0, rho0, p0) on the closed window [a, b].

    Verdicts computed from a profile hold for the window only; the data
    outside [a, b] are not inspected.
    """

    def __init__(
        self,
        v0: Expr,
        rho0: Expr,
        p0: Expr,
        domain: Tuple[float, float] = (-1.0, 1.0),
        name: str = "",
    ):
        a, b = float(domain[0]), float(domain[1])
        if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
            raise DomainError(f"domain must satisfy a < b, got [{a}, {b}]", field="domain")
        self.v0: Expr = v0
        self.rho0: Expr = rho0
        self.p0: Expr = p0
        self.domain: Tuple[float, float] = (a, b)
        self.name: str = name

    @classmethod
    def from_text(
        cls,
        v0: str,
        rho0: str,
        p0: str,
        domain: Tuple[float, float] = (-1.0, 1.0),
        name: str = "",
    ) -> "Profile":
        return cls(parse(v0), parse(rho0), parse(p0), domain, name)

    @property
    def a(self) -> float:
        return self.domain[0]

    @property
    def b(self) -> float:
        return self.domain[1]

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    def uniform_grid(self, nodes: int) -> np.ndarray:
        return np.linspace(self.a, self.b, int(nodes))

    def isentropic(self, gp: GasParams) -> "Profile":
        """Same velocity and density, pressure replaced by rho0^gamma / gamma."""
        if gp.gamma == -1.0:
            p0 = chaplygin_pressure_expr(self.rho0)
        else:
            p0 = isentropic_pressure_expr(self.rho0, gp.gamma)
        return Profile(self.v0, self.rho0, p0, self.domain, self.name)

    def with_velocity(self, v0: str) -> "Profile":
        return Profile(parse(v0), self.rho0, self.p0, self.domain, self.name)

    def asDict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "v0": self.v0.to_text(),
            "rho0": self.rho0.to_text(),
            "p0": self.p0.to_text(),
            "domain": [self.a, self.b],
        }

    def __repr__(self) -> str:
        return (
            f"Profile(v0={self.v0.to_text()!r}, rho0={self.rho0.to_text()!r}, "
            f"p0={self.p0.to_text()!r}, domain={self.domain})"
        )


class PointData:
    """Values and first derivatives of the data at one coordinate."""

    def __init__(
        self,
        x: float,
        v0: float,
        rho0: float,
        p0: float,
        dv0: float = 0.0,
        drho0: float = 0.0,
        dp0: float = 0.0,
    ):
        self.x: float = float(x)
        self.v0: float = float(v0)
        self.rho0: float = float(rho0)
        self.p0: float = float(p0)
        self.dv0: float = float(dv0)
        self.drho0: float = float(drho0)
        self.dp0: float = float(dp0)

    @property
    def state(self) -> PrimitiveState:
        return PrimitiveState(self.v0, self.rho0, self.p0)

    @property
    def slopes(self) -> Tuple[float, float, float]:
        return (self.dv0, self.drho0, self.dp0)

    def asDict(self) -> Dict[str, float]:
        return {
            "x": self.x,
            "v0": self.v0,
            "rho0": self.rho0,
            "p0": self.p0,
            "dv0": self.dv0,
            "drho0": self.drho0,
            "dp0": self.dp0,
        }

    def __repr__(self) -> str:
        return (
            f"PointData(x={self.x}, v0={self.v0}, rho0={self.rho0}, p0={self.p0}, "
            f"dv0={self.dv0}, drho0={self.drho0}, dp0={self.dp0})"
        )


class ProfileSample:
    """Column arrays of a sampled profile, one entry per grid node."""

    def __init__(self, x, v0, dv0, rho0, drho0, p0, dp0):
        self.x = x
        self.v0 = v0
        self.dv0 = dv0
        self.rho0 = rho0
        self.drho0 = drho0
        self.p0 = p0
        self.dp0 = dp0

    def __len__(self) -> int:
        return len(self.x)

    def point(self, i: int) -> PointData:
        return PointData(
            self.x[i], self.v0[i], self.rho0[i], self.p0[i],
            self.dv0[i], self.drho0[i], self.dp0[i],
        )

    def points(self) -> List[PointData]:
        return [self.point(i) for i in range(len(self.x))]


def _check_grid(pr: Profile, grid: np.ndarray):
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a non-empty 1-D sequence", field="grid")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("grid must be strictly increasing", field="grid")
    slack = 1e-12 * max(1.0, pr.length)
    if grid[0] < pr.a - slack or grid[-1] > pr.b + slack:
        raise DomainError(
            f"grid [{grid[0]}, {grid[-1]}] leaves the domain [{pr.a}, {pr.b}]", field="grid"
        )


def sample_arrays(pr: Profile, grid: Sequence[float], gp: Optional[GasParams] = None) -> ProfileSample:
    """
    Evaluate the three expressions and their derivatives on the whole grid.

    Positivity is checked on every node before anything is returned; the
    first offending x is reported. With gp.gamma < 0 the pressure condition
    is gamma * p0 > 0.

    Raises:
        DomainError: grid outside the window or positivity violation.
        EvaluationError: domain fault inside an expression.
    """
    grid = np.asarray(grid, dtype=float)
    _check_grid(pr, grid)
    v, dv = eval_d(pr.v0, grid)
    rho, drho = eval_d(pr.rho0, grid)
    p, dp = eval_d(pr.p0, grid)
    bad = rho <= 0.0
    if np.any(bad):
        x = float(grid[np.argmax(bad)])
        raise DomainError(f"rho0 must be positive, violated at x={x!r}", field="rho0", x=x)
    sign = -1.0 if gp is not None and gp.gamma < 0.0 else 1.0
    bad = sign * p <= 0.0
    if np.any(bad):
        x = float(grid[np.argmax(bad)])
        raise DomainError(f"p0 has the wrong sign at x={x!r}", field="p0", x=x)
    return ProfileSample(grid, v, dv, rho, drho, p, dp)


def sample_profile(pr: Profile, grid: Sequence[float], gp: Optional[GasParams] = None) -> List[PointData]:
    """
    PointData per grid node; fails as a whole if any node violates positivity.
    """
    return sample_arrays(pr, grid, gp).points()


def sample_point(pr: Profile, x: float, gp: Optional[GasParams] = None) -> PointData:
    return sample_arrays(pr, [x], gp).point(0)


# ----------------------------------------------------------------------
#                               PRESETS
# ----------------------------------------------------------------------


def constant_profile(v: float = 0.0, rho: float = 1.0, p: float = 1.0, domain=(-1.0, 1.0)) -> Profile:
    return Profile.from_text(repr(float(v)), repr(float(rho)), repr(float(p)), domain, "constant")


def gaussian_bump(a: float, m: float = 0.0, s: float = 1.0) -> str:
    """Text of a * exp(-(x-m)^2 / s)."""
    return f"{a!r}*exp(-(x-{m!r})^2/{s!r})"


def remark1_profile(gamma: float, v0: str = "-10*x", domain=(-2.0, 2.0)) -> Profile:
    """
    p0 = exp(x), rho0 = exp(k x), k = 1 + 2/gamma: b(x) = 1 and R2 != 0
    everywhere, so the data stay smooth for any velocity.
    """
    k = 1.0 + 2.0 / gamma
    return Profile.from_text(v0, f"exp({k!r}*x)", "exp(x)", domain, "remark1")


def remark1_bounded_profile(gamma: float, v0: str = "-10*x*exp(-x^2)", domain=(-4.0, 4.0)) -> Profile:
    """
    rho0 = p0^k with the same k and a bounded monotone p0 = 1 + tanh(x)/2:
    again b(x) = 1 and R2 != 0, with pressure and density flat near the
    window edges.
    """
    k = 1.0 + 2.0 / gamma
    p0 = "(1 + 0.5*tanh(x))"
    return Profile.from_text(v0, f"{p0}^{k!r}", p0, domain, "remark1-tanh")


def _preset_remark1(gamma: float) -> Profile:
    return remark1_profile(gamma)


def _preset_remark1_pulse(gamma: float) -> Profile:
    pr = remark1_profile(gamma, v0="-10*x*exp(-x^2)")
    pr.name = "remark1-pulse"
    return pr


def _preset_linear_compression(gamma: float) -> Profile:
    return Profile.from_text("-x", "1", "1", (-1.0, 1.0), "linear-compression")


def _preset_isentropic_bump(gamma: float) -> Profile:
    pr = Profile.from_text("0", "1 + " + gaussian_bump(0.1), "1", (-3.0, 3.0), "isentropic-bump")
    return pr.isentropic(GasParams(gamma))


def _preset_entropy_spot(gamma: float) -> Profile:
    """Pressure equilibrium with a small density spot: a resting entropy wave."""
    return Profile.from_text("0", "1 + " + gaussian_bump(0.001), "1", (-3.0, 3.0), "entropy-spot")


def _preset_chaplygin_demo(gamma: float) -> Profile:
    pr = Profile.from_text("-tanh(x)", "1 + " + gaussian_bump(0.5), "1", (-3.0, 3.0), "chaplygin-demo")
    return pr.isentropic(GasParams(-1.0))


def _preset_isothermal_demo(gamma: float) -> Profile:
    pr = remark1_profile(1.0, v0="-x*exp(-x^2)")
    pr.name = "isothermal-demo"
    return pr


def _preset_acoustic_pulse(gamma: float) -> Profile:
    pr = Profile.from_text("0", f"1 + 0.1*sin({PI}*x)", "1", (-1.0, 1.0), "acoustic-pulse")
    return pr.isentropic(GasParams(gamma))


def _preset_constant(gamma: float) -> Profile:
    return constant_profile(0.0, 1.0, 1.0 / gamma)


PROFILE_PRESETS: Dict[str, Callable[[float], Profile]] = {
    "constant": _preset_constant,
    "remark1": _preset_remark1,
    "remark1-pulse": _preset_remark1_pulse,
    "remark1-tanh": remark1_bounded_profile,
    "linear-compression": _preset_linear_compression,
    "isentropic-bump": _preset_isentropic_bump,
    "chaplygin-demo": _preset_chaplygin_demo,
    "isothermal-demo": _preset_isothermal_demo,
    "acoustic-pulse": _preset_acoustic_pulse,
    "entropy-spot": _preset_entropy_spot,
}


def preset_profile(name: str, gamma: float) -> Optional[Profile]:
    """Named profile family evaluated at gamma, None for an unknown name."""
    factory = PROFILE_PRESETS.get(name)
    if factory is None:
        return None
    return factory(gamma)
