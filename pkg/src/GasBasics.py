from enum import Enum
from typing import Dict, Tuple, Any


VERSION = "1.0.0"


# Ghost-cell treatment at the ends of the finite-volume window
class BoundaryMode(Enum):
    periodic = "periodic"  # wrap around, profile must be periodic on [a,b]
    extrapolate = "extrapolate"  # constant far field, copy edge cell
    linear = "linear"  # linear extrapolation of primitives, constant where it loses positivity

    @staticmethod
    def named(name: str):
        return BoundaryMode(name) if name in BoundaryMode.__members__ else None


# Fate of an integrated Riemann-slope trajectory
class Outcome(Enum):
    bounded = "Bounded"  # reached t_max below the escape threshold
    escaped = "Escaped"  # crossed the escape threshold
    blowup = "BlowUpEstimated"  # solver gave up near a singularity, time extrapolated

    @staticmethod
    def named(name: str):
        for member in Outcome:
            if member.value == name or member.name == name:
                return member
        return None


class XValStatus(Enum):
    consistent = "Consistent"
    discrepant = "Discrepant"
    partial = "Partial"  # a stage failed, report is incomplete


# Process exit codes, the only machine contract of the CLI besides files
class ExitCode(Enum):
    smooth = 0
    error = 1
    blowup = 2


# Adjust these before classifying a profile.
class CriterionAdjustment:
    def __init__(
        self,
        eps_zero: float = 1e-12,
        tolerance: float = 1e-12,
        nodes: int = 401,
        refine_fraction: float = 1e-6,
        max_refinements: int = 64,
    ):
        # a quantity q counts as zero when |q| <= eps_zero * max(1, local scale)
        self.eps_zero: float = eps_zero
        # band on inequality boundaries of the condition sets
        self.tolerance: float = tolerance
        self.nodes: int = nodes  # initial uniform grid size
        self.refine_fraction: float = refine_fraction  # min spacing relative to b-a
        self.max_refinements: int = max_refinements  # boundaries refined per profile

    def asDict(self) -> Dict[str, Any]:
        return {
            "eps_zero": self.eps_zero,
            "tolerance": self.tolerance,
            "nodes": self.nodes,
            "refine_fraction": self.refine_fraction,
            "max_refinements": self.max_refinements,
        }


class ODEAdjustment:
    def __init__(
        self,
        rtol: float = 1e-10,
        atol: float = 1e-12,
        t_max: float = 100.0,
        escape: float = 1e8,
        method: str = "DOP853",
        tail_decade: float = 10.0,
    ):
        self.rtol: float = rtol
        self.atol: float = atol
        self.t_max: float = t_max
        self.escape: float = escape  # state magnitude treated as blow-up
        self.method: str = method  # scipy solve_ivp embedded RK pair
        self.tail_decade: float = tail_decade  # growth factor of the fitted tail window

    def with_tol(self, tol: float) -> "ODEAdjustment":
        """Copy with rtol=tol and atol two decades below."""
        return ODEAdjustment(
            rtol=tol,
            atol=tol * 1e-2,
            t_max=self.t_max,
            escape=self.escape,
            method=self.method,
            tail_decade=self.tail_decade,
        )

    def asDict(self) -> Dict[str, Any]:
        return {
            "rtol": self.rtol,
            "atol": self.atol,
            "t_max": self.t_max,
            "escape": self.escape,
            "method": self.method,
            "tail_decade": self.tail_decade,
        }


class FVAdjustment:
    def __init__(
        self,
        cells: int = 256,
        cfl: float = 0.4,
        t_end: float = 1.0,
        boundary: BoundaryMode = BoundaryMode.periodic,
        steepen_factor: float = 10.0,
        compare_factor: float = 1.5,
        snapshot_times: Tuple[float, ...] = (),
    ):
        self.cells: int = cells
        self.cfl: float = cfl
        self.t_end: float = t_end
        self.boundary: BoundaryMode = boundary
        # t_steepen: first time max|dv/dx| exceeds steepen_factor times its initial value
        self.steepen_factor: float = steepen_factor
        self.compare_factor: float = compare_factor  # slack against ODE predictions
        self.snapshot_times: Tuple[float, ...] = tuple(snapshot_times)

    def asDict(self) -> Dict[str, Any]:
        return {
            "cells": self.cells,
            "cfl": self.cfl,
            "t_end": self.t_end,
            "boundary": self.boundary.value,
            "steepen_factor": self.steepen_factor,
            "compare_factor": self.compare_factor,
            "snapshot_times": list(self.snapshot_times),
        }


defaultCriterion = CriterionAdjustment()
defaultODE = ODEAdjustment()
tightODE = ODEAdjustment(rtol=1e-12, atol=1e-14)
defaultFV = FVAdjustment()


class GdblowError(Exception):
    prefix = ""

    def __init__(self, message: str):
        super().__init__(f"{self.prefix}{message}")
        self.detail = message


class DomainError(GdblowError, ValueError):
    prefix = "domain error: "

    def __init__(self, message: str, field: str = "", x: float = None):
        super().__init__(message)
        self.field = field
        self.x = x


class ExpressionSyntaxError(GdblowError):
    prefix = "syntax error: "

    def __init__(self, message: str, offset: int = 0, expected: Tuple[str, ...] = ()):
        super().__init__(message)
        self.offset = offset
        self.expected = tuple(expected)


class UnknownIdentifierError(ExpressionSyntaxError):
    prefix = "unknown identifier: "


class ArityError(ExpressionSyntaxError):
    prefix = "arity error: "


class EvaluationError(GdblowError):
    prefix = "evaluation error: "

    def __init__(self, message: str, x: float = None, subexpression: str = ""):
        super().__init__(message)
        self.x = x
        self.subexpression = subexpression


class ScenarioError(GdblowError):
    prefix = "scenario error: "


class SimulationBreakdown(GdblowError):
    prefix = "breakdown: "

    def __init__(self, message: str, cell: int = -1, time: float = 0.0):
        super().__init__(message)
        self.cell = cell
        self.time = time
