# GasState.py
# Polytropic gas parameters, primitive states and thermodynamic conversions.

import math
from typing import Dict, Tuple
import logging

from .GasBasics import DomainError

logger = logging.getLogger(__name__)


class GasParams:
    """
    Parameters of the polytropic law p = rho^gamma * exp(S) / gamma.
    """

    def __init__(self, gamma: float = 1.4):
        if not math.isfinite(gamma):
            raise DomainError(f"gamma must be finite, got {gamma}", field="gamma")
        if gamma == 0.0:
            raise DomainError("gamma must be non-zero", field="gamma")
        self.gamma: float = float(gamma)

    @property
    def isothermal(self) -> bool:
        return self.gamma == 1.0

    @property
    def chaplygin(self) -> bool:
        return self.gamma == -1.0

    def asDict(self) -> Dict[str, float]:
        return {"gamma": self.gamma}

    def __eq__(self, other) -> bool:
        return isinstance(other, GasParams) and self.gamma == other.gamma

    def __repr__(self) -> str:
        return f"GasParams(gamma={self.gamma})"


class PrimitiveState:
    """
    Velocity, density and pressure at one point, nondimensional.

    The conservative form used by the finite-volume solver and the
    (u1, u2, u3) = (v, 1/rho, p) form used by the slope system are both
    derived from here.
    """

    def __init__(self, v: float, rho: float, p: float):
        self.v: float = float(v)
        self.rho: float = float(rho)
        self.p: float = float(p)

    @property
    def tau(self) -> float:
        """Specific volume u2 = 1/rho."""
        return 1.0 / self.rho

    def as_u(self) -> Tuple[float, float, float]:
        return (self.v, self.tau, self.p)

    @classmethod
    def from_u(cls, u1: float, u2: float, u3: float) -> "PrimitiveState":
        return cls(v=u1, rho=1.0 / u2, p=u3)

    def check(self, gp: "GasParams") -> "PrimitiveState":
        """
        Raise DomainError naming the offending field unless the state is away
        from vacuum. For gamma < 0 (Chaplygin-type laws) the pressure is
        negative and the requirement is gamma * p > 0.
        """
        if not (self.rho > 0.0) or not math.isfinite(self.rho):
            raise DomainError(f"density must be positive, got rho={self.rho}", field="rho")
        if gp.gamma > 0.0:
            if not (self.p > 0.0) or not math.isfinite(self.p):
                raise DomainError(f"pressure must be positive, got p={self.p}", field="p")
        elif not (gp.gamma * self.p > 0.0):
            raise DomainError(
                f"gamma*p must be positive, got gamma={gp.gamma}, p={self.p}", field="p"
            )
        return self

    def asDict(self) -> Dict[str, float]:
        return {"v": self.v, "rho": self.rho, "p": self.p}

    def __repr__(self) -> str:
        return f"PrimitiveState(v={self.v}, rho={self.rho}, p={self.p})"


class CharSpeeds:
    """Wave speeds xi1 < xi2 < xi3 of the three characteristic families."""

    def __init__(self, xi1: float, xi2: float, xi3: float):
        self.xi1: float = xi1
        self.xi2: float = xi2
        self.xi3: float = xi3

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.xi1, self.xi2, self.xi3)

    def __repr__(self) -> str:
        return f"CharSpeeds(xi1={self.xi1}, xi2={self.xi2}, xi3={self.xi3})"


def sound_speed(state: PrimitiveState, gp: GasParams) -> float:
    """
    c = sqrt(gamma * p / rho), equal to sqrt(gamma * u3 * u2).

    Raises:
        DomainError: non-positive density or pressure.
    """
    state.check(gp)
    return math.sqrt(gp.gamma * state.p / state.rho)


def char_speeds(state: PrimitiveState, gp: GasParams) -> CharSpeeds:
    c = sound_speed(state, gp)
    return CharSpeeds(state.v - c, state.v, state.v + c)


def entropy(state: PrimitiveState, gp: GasParams) -> float:
    """
    S = ln(gamma * p / rho^gamma), the polytropic law solved for S.

    Dropping the gamma factor (S = ln(p / rho^gamma)) shifts S by the
    constant ln(gamma); derivatives of S are the same either way.
    """
    state.check(gp)
    return math.log(gp.gamma * state.p) - gp.gamma * math.log(state.rho)


def isentropic_pressure(rho: float, gp: GasParams) -> float:
    """Pressure with S = 0, rho^gamma / gamma."""
    return rho ** gp.gamma / gp.gamma
