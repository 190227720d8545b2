"""Truncated Taylor ("jet") arithmetic for propagating derivatives.

A `Jet` bundles the derivative values ``[f(x), f'(x), ..., f^(k)(x)]`` of a
smooth function at one point. Arithmetic on jets propagates derivatives
through sums, products, quotients, real powers, and exponentials mechanically
— the standard truncated-power-series recurrences, applied to the scaled
coefficients ``c_j = f^(j)(x)/j!``.

The package uses jets to turn the (up to 7th) derivatives of the coefficient
function a(x) into the derived quantities the marching schemes need: the
dispersive correction b(x), the integration-by-parts coefficients b_p(x)
obtained by repeatedly dividing a derivative by twice the phase slope, and
the auxiliary quotients of the third-order quadrature. Hand-expanding those
formulas grows unmanageably with the derivative order; jets keep the
computation mechanical and testable.

Notes
-----
All recurrences below are classical; see e.g. D. E. Knuth, *The Art of
Computer Programming*, Vol. 2, §4.7, or the automatic-differentiation
literature on univariate Taylor polynomial arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import JetOrderError

__all__ = ["Jet"]

_FACTORIALS = tuple(float(math.factorial(j)) for j in range(16))


def _to_taylor(values: Tuple[float, ...]) -> list[float]:
    return [v / _FACTORIALS[j] for j, v in enumerate(values)]


def _from_taylor(coeffs: Sequence[float]) -> Tuple[float, ...]:
    return tuple(c * _FACTORIALS[j] for j, c in enumerate(coeffs))


@dataclass(frozen=True)
class Jet:
    """Derivative values of a smooth function at a point.

    Attributes
    ----------
    values : tuple of float
        ``(f(x), f'(x), ..., f^(k)(x))`` where ``k = len(values) - 1`` is the
        jet order.
    x : float
        The expansion point.
    """

    values: Tuple[float, ...]
    x: float

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise JetOrderError("a jet needs at least the value entry")
        if len(values) > len(_FACTORIALS):
            raise JetOrderError(f"jet order {len(values) - 1} not supported")
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"non-finite jet entries at x={self.x}: {values}")

    # ===== constructors =====

    @classmethod
    def constant(cls, c: float, x: float, order: int) -> "Jet":
        """The jet of the constant function c."""
        return cls((float(c),) + (0.0,) * order, x)

    @classmethod
    def variable(cls, x: float, order: int) -> "Jet":
        """The jet of the identity function f(y) = y at x."""
        if order == 0:
            return cls((float(x),), x)
        return cls((float(x), 1.0) + (0.0,) * (order - 1), x)

    # ===== basic queries =====

    @property
    def order(self) -> int:
        return len(self.values) - 1

    @property
    def value(self) -> float:
        return self.values[0]

    def derivative(self, k: int) -> float:
        """The k-th derivative value f^(k)(x)."""
        if not 0 <= k <= self.order:
            raise JetOrderError(
                f"derivative order {k} outside jet order {self.order}"
            )
        return self.values[k]

    def truncate(self, order: int) -> "Jet":
        """Drop derivatives beyond `order` (which must not exceed self.order)."""
        if order > self.order:
            raise JetOrderError(
                f"cannot extend jet of order {self.order} to {order}"
            )
        return Jet(self.values[: order + 1], self.x)

    def derivative_jet(self) -> "Jet":
        """The jet of f' at the same point, one order lower."""
        if self.order == 0:
            raise JetOrderError("cannot differentiate an order-0 jet")
        return Jet(self.values[1:], self.x)

    # ===== arithmetic =====

    def _common(self, other: "Jet") -> int:
        if other.x != self.x:
            raise ValueError(
                f"jet arithmetic needs a common point: {self.x} != {other.x}"
            )
        return min(self.order, other.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            n = self._common(other)
            return Jet(
                tuple(a + b for a, b in zip(self.values[: n + 1], other.values)),
                self.x,
            )
        if isinstance(other, (int, float)):
            return Jet((self.values[0] + other,) + self.values[1:], self.x)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(tuple(-v for v in self.values), self.x)

    def __sub__(self, other):
        if isinstance(other, Jet):
            n = self._common(other)
            return Jet(
                tuple(a - b for a, b in zip(self.values[: n + 1], other.values)),
                self.x,
            )
        if isinstance(other, (int, float)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = self._common(other)
            a = _to_taylor(self.values[: n + 1])
            b = _to_taylor(other.values[: n + 1])
            c = [
                sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(n + 1)
            ]
            return Jet(_from_taylor(c), self.x)
        if isinstance(other, (int, float)):
            return Jet(tuple(v * other for v in self.values), self.x)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            n = self._common(other)
            if other.values[0] == 0.0:
                raise ZeroDivisionError(
                    f"jet division by zero value at x={self.x}"
                )
            a = _to_taylor(self.values[: n + 1])
            b = _to_taylor(other.values[: n + 1])
            q: list[float] = []
            for k in range(n + 1):
                acc = a[k]
                for j in range(k):
                    acc -= q[j] * b[k - j]
                q.append(acc / b[0])
            return Jet(_from_taylor(q), self.x)
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, float)):
            return Jet.constant(other, self.x, self.order) / self
        return NotImplemented

    def pow(self, exponent: float) -> "Jet":
        """The jet of f**exponent; requires f(x) > 0 for non-integer exponents.

        Uses the logarithmic-derivative recurrence: with u = f and w = u**p,
        u w' = p u' w, giving
        ``w_k = (1/(k u_0)) * sum_{j=1..k} ((p+1)j - k) u_j w_{k-j}``
        in Taylor coefficients.
        """
        u0 = self.values[0]
        p = float(exponent)
        if u0 <= 0.0 and p != round(p):
            raise ValueError(
                f"jet power {p} needs a positive value, got {u0} at x={self.x}"
            )
        if u0 == 0.0:
            raise ZeroDivisionError("jet power of a zero value")
        u = _to_taylor(self.values)
        n = self.order
        w = [u0**p]
        for k in range(1, n + 1):
            acc = 0.0
            for j in range(1, k + 1):
                acc += ((p + 1.0) * j - k) * u[j] * w[k - j]
            w.append(acc / (k * u0))
        return Jet(_from_taylor(w), self.x)

    def sqrt(self) -> "Jet":
        """The jet of sqrt(f); requires f(x) > 0."""
        return self.pow(0.5)

    def exp(self) -> "Jet":
        """The jet of exp(f)."""
        u = _to_taylor(self.values)
        n = self.order
        w = [math.exp(u[0])]
        for k in range(1, n + 1):
            acc = 0.0
            for j in range(1, k + 1):
                acc += j * u[j] * w[k - j]
            w.append(acc / k)
        return Jet(_from_taylor(w), self.x)
