import numpy as np
from typing import Any, Union

Number = Union[float, np.ndarray]


class Dual:
    def __init__(self, value: Number = 0.0, derivative: Number = 0.0):
        """
        A value together with its first derivative with respect to x.

        Both parts may be floats or numpy arrays of equal shape, so a whole
        grid is differentiated in one pass.

        Args:
            value: The function value.
            derivative: The derivative of the value. Defaults to 0.0 (a constant).
        """
        self.value = np.asarray(value, dtype=float)
        self.derivative = np.asarray(derivative, dtype=float) + np.zeros_like(self.value)

    @staticmethod
    def variable(x: Number) -> "Dual":
        """The independent variable itself: derivative one everywhere."""
        x = np.asarray(x, dtype=float)
        return Dual(x, np.ones_like(x))

    @staticmethod
    def constant(c: float, like: "Dual" = None) -> "Dual":
        if like is None:
            return Dual(c, 0.0)
        return Dual(np.full_like(like.value, c), np.zeros_like(like.value))

    def __add__(self, other: "Dual") -> "Dual":
        if not isinstance(other, Dual):
            raise TypeError("Addition is supported between Dual instances only.")
        return Dual(self.value + other.value, self.derivative + other.derivative)

    def __sub__(self, other: "Dual") -> "Dual":
        if not isinstance(other, Dual):
            raise TypeError("Subtraction is supported between Dual instances only.")
        return Dual(self.value - other.value, self.derivative - other.derivative)

    def __mul__(self, other: "Dual") -> "Dual":
        if not isinstance(other, Dual):
            raise TypeError("Multiplication is supported between Dual instances only.")
        return Dual(
            self.value * other.value,
            self.value * other.derivative + self.derivative * other.value,
        )

    def __truediv__(self, other: "Dual") -> "Dual":
        """
        Quotient rule. The caller checks the denominator for zeros.
        """
        if not isinstance(other, Dual):
            raise TypeError("Division is supported between Dual instances only.")
        return Dual(
            self.value / other.value,
            (self.derivative * other.value - self.value * other.derivative)
            / (other.value * other.value),
        )

    def __neg__(self) -> "Dual":
        return Dual(-self.value, -self.derivative)

    def __pow__(self, other: "Dual") -> "Dual":
        """
        Real power a^b.

        A constant exponent uses the power rule; a variable exponent uses
        a^b = exp(b ln a). Non-integer exponents need a positive base.
        """
        if not isinstance(other, Dual):
            raise TypeError("Power is supported between Dual instances only.")
        if not np.any(other.derivative):
            n = other.value
            if np.all(n == 0):
                return Dual(np.ones_like(self.value + n), np.zeros_like(self.value + n))
            return Dual(self.value ** n, n * self.value ** (n - 1) * self.derivative)
        value = self.value ** other.value
        return Dual(
            value,
            value * (other.derivative * np.log(self.value) + other.value * self.derivative / self.value),
        )

    def exp(self) -> "Dual":
        e = np.exp(self.value)
        return Dual(e, e * self.derivative)

    def log(self) -> "Dual":
        return Dual(np.log(self.value), self.derivative / self.value)

    def sqrt(self) -> "Dual":
        r = np.sqrt(self.value)
        return Dual(r, self.derivative / (2.0 * r))

    def sin(self) -> "Dual":
        return Dual(np.sin(self.value), np.cos(self.value) * self.derivative)

    def cos(self) -> "Dual":
        return Dual(np.cos(self.value), -np.sin(self.value) * self.derivative)

    def tanh(self) -> "Dual":
        t = np.tanh(self.value)
        return Dual(t, (1.0 - t * t) * self.derivative)

    def __abs__(self) -> "Dual":
        # sign(0) = 0, so the kink of |x| gets derivative 0
        return Dual(np.abs(self.value), np.sign(self.value) * self.derivative)

    def __eq__(self, other: Any) -> bool:
        """
        Check if two duals agree in value and derivative within a tolerance.
        """
        if not isinstance(other, Dual):
            return False
        return np.allclose(self.value, other.value, atol=1e-12) and np.allclose(
            self.derivative, other.derivative, atol=1e-12
        )

    def __repr__(self) -> str:
        return f"Dual(value={self.value}, derivative={self.derivative})"
