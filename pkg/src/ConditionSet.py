# src/ConditionSet.py

from enum import IntFlag
from typing import Any, List


class ConditionFlags(IntFlag):
    none = 0  # no smoothness condition holds
    expanding = 1 << 0  # set 1: b >= 0 and R1 >= 0
    pressure_driven = 1 << 1  # set 2: b > 0 and R2 != 0
    level_set = 1 << 2  # set 3: b < 0, R1 >= 0 and R1^2 + 2b/(gamma-1) R2^2 >= 0
    flat_pressure = 1 << 3  # set 4: R2 = 0 and R1 >= 0
    hyperbolic = 1 << 4  # gamma = -1 only: R1 >= -|R2|


class ConditionSet:
    """
    Membership of one point in the four smoothness condition sets.

    A point is safe when it belongs to at least one set.
    """

    numbers = {
        ConditionFlags.expanding: 1,
        ConditionFlags.pressure_driven: 2,
        ConditionFlags.level_set: 3,
        ConditionFlags.flat_pressure: 4,
    }

    base_flags = tuple(numbers.keys()) + (ConditionFlags.hyperbolic,)

    def __init__(self, flags: ConditionFlags = ConditionFlags.none):
        self.flags = ConditionFlags(flags)

    def insert(self, flag: ConditionFlags):
        self.flags |= flag

    def remove(self, flag: ConditionFlags):
        self.flags &= ~flag

    def contains(self, flag: ConditionFlags) -> bool:
        return (self.flags & flag) == flag

    @property
    def safe(self) -> bool:
        return self.flags != ConditionFlags.none

    def set_numbers(self) -> List[int]:
        """Numbers (1 to 4) of the satisfied sets, ascending."""
        return [n for flag, n in ConditionSet.numbers.items() if flag in self.flags]

    def list_base_flags(self) -> List[str]:
        return [flag.name for flag in ConditionSet.base_flags if flag in self.flags]

    def asDict(self) -> dict:
        return {flag.name: flag in self.flags for flag in ConditionSet.base_flags}

    @classmethod
    def of_numbers(cls, numbers) -> "ConditionSet":
        result = cls()
        for flag, n in cls.numbers.items():
            if n in numbers:
                result.insert(flag)
        return result

    @classmethod
    def named(cls, name: str) -> "ConditionSet":
        """Look up a single set by flag name; empty set for an unknown name."""
        member = ConditionFlags.__members__.get(name)
        return cls(member) if member is not None else cls()

    def __str__(self) -> str:
        parts = [str(n) for n in self.set_numbers()]
        if ConditionFlags.hyperbolic in self.flags:
            parts.append("hyperbolic")
        if not parts:
            return "no set"
        return "+".join(parts)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, ConditionSet):
            return self.flags == other.flags
        return False

    def __hash__(self) -> int:
        return hash(self.flags)

    def __repr__(self) -> str:
        return f"ConditionSet(flags={self.flags!r})"

    def __or__(self, other: Any) -> "ConditionSet":
        if isinstance(other, ConditionSet):
            return ConditionSet(self.flags | other.flags)
        if isinstance(other, ConditionFlags):
            return ConditionSet(self.flags | other)
        return NotImplemented

    def __and__(self, other: Any) -> "ConditionSet":
        if isinstance(other, ConditionSet):
            return ConditionSet(self.flags & other.flags)
        if isinstance(other, ConditionFlags):
            return ConditionSet(self.flags & other)
        return NotImplemented
