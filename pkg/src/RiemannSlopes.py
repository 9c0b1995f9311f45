# RiemannSlopes.py
# Riemann slopes of the non-isentropic Euler system, their ODEs along rays
# and the first integral of the reduced planar system.

import math
from typing import Dict, Optional, Tuple
import logging

import numpy as np

from .GasBasics import DomainError
from .GasState import GasParams, PrimitiveState

logger = logging.getLogger(__name__)

INFINITE = math.inf


class PVector:
    """
    Riemann slopes P1 = v' - p'/s, P2 = s tau' + p'/s, P3 = v' + p'/s,
    s = sqrt(gamma p rho), tau = 1/rho.
    """

    def __init__(self, P1: float = 0.0, P2: float = 0.0, P3: float = 0.0):
        self.P1: float = float(P1)
        self.P2: float = float(P2)
        self.P3: float = float(P3)

    def as_array(self) -> np.ndarray:
        return np.array([self.P1, self.P2, self.P3])

    @classmethod
    def from_array(cls, a) -> "PVector":
        return cls(a[0], a[1], a[2])

    def swapped(self) -> "PVector":
        """P1 <-> P3 with P2 -> -P2, the image under x -> -x."""
        return PVector(self.P3, -self.P2, self.P1)

    def asDict(self) -> Dict[str, float]:
        return {"P1": self.P1, "P2": self.P2, "P3": self.P3}

    def __eq__(self, other) -> bool:
        return isinstance(other, PVector) and np.allclose(self.as_array(), other.as_array(), rtol=1e-12, atol=1e-12)

    def __repr__(self) -> str:
        return f"PVector(P1={self.P1}, P2={self.P2}, P3={self.P3})"


class RState:
    """Reduced slopes R1 = (P1+P3)/2, R2 = (P3-P1)/2 with the constant b."""

    def __init__(self, R1: float, R2: float, b: float = 0.0, gamma: float = 1.4):
        self.R1: float = float(R1)
        self.R2: float = float(R2)
        self.b: float = float(b)
        self.gamma: float = float(gamma)

    def as_array(self) -> np.ndarray:
        return np.array([self.R1, self.R2])

    def moved(self, R1: float, R2: float) -> "RState":
        return RState(R1, R2, self.b, self.gamma)

    @property
    def magnitude(self) -> float:
        return math.hypot(self.R1, self.R2)

    def asDict(self) -> Dict[str, float]:
        return {"R1": self.R1, "R2": self.R2, "b": self.b, "gamma": self.gamma}

    def __repr__(self) -> str:
        return f"RState(R1={self.R1}, R2={self.R2}, b={self.b}, gamma={self.gamma})"


class RayState:
    """(u1, u2, u3) = (v, 1/rho, p) together with the slopes carried along a ray."""

    def __init__(self, u1: float, u2: float, u3: float, P: PVector):
        self.u1: float = float(u1)
        self.u2: float = float(u2)
        self.u3: float = float(u3)
        self.P: PVector = P

    @classmethod
    def from_primitive(cls, state: PrimitiveState, P: PVector) -> "RayState":
        u1, u2, u3 = state.as_u()
        return cls(u1, u2, u3, P)

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2, self.u3, self.P.P1, self.P.P2, self.P.P3])

    @classmethod
    def from_array(cls, a) -> "RayState":
        return cls(a[0], a[1], a[2], PVector(a[3], a[4], a[5]))

    def asDict(self) -> Dict[str, float]:
        result = {"u1": self.u1, "u2": self.u2, "u3": self.u3}
        result.update(self.P.asDict())
        return result

    def __repr__(self) -> str:
        return f"RayState(u1={self.u1}, u2={self.u2}, u3={self.u3}, P={self.P})"


def riemann_slopes(state: PrimitiveState, slopes: Tuple[float, float, float], gp: GasParams) -> PVector:
    """
    Args:
        state: Primitive state at the foot point.
        slopes: (v', rho', p').

    Raises:
        DomainError: invalid state.
    """
    state.check(gp)
    dv, drho, dp = slopes
    s = math.sqrt(gp.gamma * state.p * state.rho)
    dtau = -drho / (state.rho * state.rho)
    return PVector(dv - dp / s, s * dtau + dp / s, dv + dp / s)


def reduce_to_R(P: PVector, eps: float = 0.0) -> Tuple[float, float, Optional[float]]:
    """
    (R1, R2, K) with K = P2 / (P1 - P3).

    K is INFINITE when P1 = P3 but P2 != 0, and None (indeterminate) when
    P2 vanishes too; both route through R2 = 0.
    """
    R1 = 0.5 * (P.P1 + P.P3)
    R2 = 0.5 * (P.P3 - P.P1)
    gap = P.P1 - P.P3
    if abs(gap) <= eps:
        return R1, R2, (None if abs(P.P2) <= eps else INFINITE)
    return R1, R2, P.P2 / gap


def rhs_P(P: PVector, gp: GasParams) -> PVector:
    """Quadratic sources F1, F2, F3 of the slope ODEs along the rays."""
    g = gp.gamma
    P1, P2, P3 = P.P1, P.P2, P.P3
    cross = 0.25 * P1 * P2 - 0.25 * (3.0 - g) * P1 * P3 - 0.25 * P2 * P3
    F1 = -0.25 * (g + 1.0) * P1 * P1 + cross
    F2 = -0.25 * (g + 1.0) * P2 * (P1 + P3)
    F3 = -0.25 * (g + 1.0) * P3 * P3 + cross
    return PVector(F1, F2, F3)


def rhs_R(R: RState) -> Tuple[float, float]:
    """dR1/dt = -R1^2 + b R2^2, dR2/dt = -((gamma+1)/2) R1 R2."""
    return (
        -R.R1 * R.R1 + R.b * R.R2 * R.R2,
        -0.5 * (R.gamma + 1.0) * R.R1 * R.R2,
    )


def rhs_augmented_ray(s: RayState, gp: GasParams) -> RayState:
    """
    Six-component derivative (U1, U2, U3, F1, F2, F3) along a ray.

    Raises:
        DomainError: u2 <= 0 or gamma u3 <= 0.
    """
    g = gp.gamma
    if not s.u2 > 0.0:
        raise DomainError(f"specific volume must be positive, got u2={s.u2}", field="u2")
    if not g * s.u3 > 0.0:
        raise DomainError(f"gamma*u3 must be positive, got u3={s.u3}", field="u3")
    P = s.P
    U1 = -math.sqrt(g * s.u2 * s.u3) * P.P3
    U2 = 0.5 * s.u2 * P.P1 + s.u2 / (2.0 * g * s.u3) * P.P3
    U3 = -g * s.u3 * P.P1
    return RayState(U1, U2, U3, rhs_P(P, gp))


class FirstIntegral:
    """
    Level function of the reduced system for fixed b and gamma.

    gamma != 1: C = (R1^2 + 2b/(gamma-1) R2^2) |R2|^(-4/(gamma+1))
    gamma == 1: C = R1^2 / R2^2 + 2b ln|R2|

    C is undefined on R2 = 0 (the Riccati branch) and for gamma = -1, where
    R2 itself is conserved.
    """

    def __init__(self, b: float, gamma: float):
        self.b: float = float(b)
        self.gamma: float = float(gamma)

    @classmethod
    def of(cls, R: RState) -> "FirstIntegral":
        return cls(R.b, R.gamma)

    @property
    def isothermal(self) -> bool:
        return self.gamma == 1.0

    @property
    def defined(self) -> bool:
        return self.gamma != -1.0

    @property
    def coefficient(self) -> float:
        return 2.0 * self.b / (self.gamma - 1.0)

    @property
    def exponent(self) -> float:
        return 4.0 / (self.gamma + 1.0)

    def value(self, R1: float, R2: float) -> Optional[float]:
        if not self.defined or R2 == 0.0:
            return None
        y = abs(R2)
        if self.isothermal:
            return R1 * R1 / (y * y) + 2.0 * self.b * math.log(y)
        return (R1 * R1 + self.coefficient * y * y) * y ** (-self.exponent)

    def values(self, R1: np.ndarray, R2: np.ndarray) -> np.ndarray:
        """Vectorised value over a trajectory; nan where R2 = 0."""
        y = np.abs(np.asarray(R2, dtype=float))
        R1 = np.asarray(R1, dtype=float)
        if not self.defined:
            return np.full(y.shape, np.nan)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.isothermal:
                c = R1 * R1 / (y * y) + 2.0 * self.b * np.log(y)
            else:
                c = (R1 * R1 + self.coefficient * y * y) * y ** (-self.exponent)
        return np.where(y > 0.0, c, np.nan)

    def r1_squared(self, C: float, R2: float) -> float:
        """R1^2 on the level set C at the given R2."""
        y = abs(R2)
        if self.isothermal:
            return y * y * (C - 2.0 * self.b * math.log(y))
        return C * y ** self.exponent - self.coefficient * y * y

    def max_abs_r1(self, R: RState) -> float:
        """
        Largest |R1| on the phase curve through R, forward and backward.

        For b > 0 the curve is a loop through the origin and the maximum sits
        where d(R1^2)/dR2 = 0 on the level set. Otherwise |R1(0)|, which
        bounds the forward orbit of every safe state.
        """
        r1 = abs(R.R1)
        if not self.defined:
            return max(r1, math.sqrt(max(self.b, 0.0)) * abs(R.R2))
        C = self.value(R.R1, R.R2)
        if C is None or self.b <= 0.0:
            return r1
        if self.isothermal:
            peak = self.b * math.exp((C - self.b) / self.b)
        else:
            q = self.exponent
            y = (q * C / (2.0 * self.coefficient)) ** (1.0 / (2.0 - q))
            peak = self.r1_squared(C, y)
        return max(r1, math.sqrt(max(peak, 0.0)))

    def bounded_loop(self, R: RState) -> bool:
        """b > 0 and R2 != 0 with gamma >= 1: the phase curve is a loop through the origin."""
        return self.defined and self.gamma >= 1.0 and self.b > 0.0 and R.R2 != 0.0

    def loop_peak(self, R: RState) -> float:
        """
        Upper bound of |(R1, R2)| on the loop through R; inf when it overflows.
        |R2| peaks where R1 = 0 on the level set.
        """
        C = self.value(R.R1, R.R2)
        try:
            if self.isothermal:
                r2 = math.exp(C / (2.0 * self.b))
            else:
                r2 = (C / self.coefficient) ** (1.0 / (2.0 - self.exponent))
            return math.hypot(self.max_abs_r1(R), max(r2, abs(R.R2)))
        except OverflowError:
            return math.inf

    def __repr__(self) -> str:
        return f"FirstIntegral(b={self.b}, gamma={self.gamma})"


def first_integral(R: RState) -> Optional[float]:
    """C at R, None on the Riccati branch R2 = 0 or for gamma = -1."""
    return FirstIntegral.of(R).value(R.R1, R.R2)
