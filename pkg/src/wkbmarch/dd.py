"""Double-double ("dd") arithmetic helpers.

A dd number is an unevaluated sum ``hi + lo`` of two floats with
``|lo| <= ulp(hi)/2``, giving roughly 32 significant decimal digits. Only the
small tool kit needed by this package is provided:

* error-free transforms ``two_sum`` / ``two_prod`` (Dekker splitting — no
  fused multiply-add is assumed),
* addition, multiplication, and division in the combinations that arise,
* ``dd_sqrt`` via one Newton correction of the double-precision root,
* trigonometric evaluation ``dd_cos_sin`` that applies the low-order word as
  a second-order correction after the libm argument reduction of the high
  word.

These are used where plain doubles provably lose the needed digits: the
power-series branch of the Airy evaluator (catastrophic cancellation), the
huge trigonometric arguments of the asymptotic branches, and the accumulated
phase divided by a small epsilon in the frame rotations.

References
----------
T. J. Dekker, "A floating-point technique for extending the available
precision", Numer. Math. 18 (1971).
J. R. Shewchuk, "Adaptive precision floating-point arithmetic", Discrete
Comput. Geom. 18 (1997).
"""

from __future__ import annotations

import math
from typing import Tuple

DD = Tuple[float, float]

# Splitting constant for Dekker's algorithm: 2**27 + 1 for IEEE doubles.
_SPLITTER = 134217729.0


def two_sum(a: float, b: float) -> DD:
    """Error-free sum: returns (s, e) with s = fl(a+b) and a+b = s+e exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a: float, b: float) -> DD:
    """Error-free sum assuming |a| >= |b|."""
    s = a + b
    e = b - (s - a)
    return s, e


def _split(a: float) -> DD:
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a: float, b: float) -> DD:
    """Error-free product: (p, e) with p = fl(a*b) and a*b = p+e exactly."""
    p = a * b
    a_hi, a_lo = _split(a)
    b_hi, b_lo = _split(b)
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def dd_add(x: DD, y: DD) -> DD:
    s, e = two_sum(x[0], y[0])
    e += x[1] + y[1]
    return quick_two_sum(s, e)


def dd_add_f(x: DD, f: float) -> DD:
    s, e = two_sum(x[0], f)
    e += x[1]
    return quick_two_sum(s, e)


def dd_neg(x: DD) -> DD:
    return (-x[0], -x[1])


def dd_sub(x: DD, y: DD) -> DD:
    return dd_add(x, (-y[0], -y[1]))


def dd_mul(x: DD, y: DD) -> DD:
    p, e = two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    return quick_two_sum(p, e)


def dd_mul_f(x: DD, f: float) -> DD:
    p, e = two_prod(x[0], f)
    e += x[1] * f
    return quick_two_sum(p, e)


def dd_div_f(x: DD, f: float) -> DD:
    q1 = x[0] / f
    p, e = two_prod(q1, f)
    r = ((x[0] - p) - e + x[1]) / f
    return quick_two_sum(q1, r)


def dd_div(x: DD, y: DD) -> DD:
    q1 = x[0] / y[0]
    r = dd_sub(x, dd_mul(y, (q1, 0.0)))
    q2 = r[0] / y[0]
    r = dd_sub(r, dd_mul(y, (q2, 0.0)))
    q3 = r[0] / y[0]
    s, e = quick_two_sum(q1, q2)
    return dd_add((s, e), (q3, 0.0))


def dd_sqrt(a: float) -> DD:
    """Square root of a nonnegative float to dd accuracy."""
    if a == 0.0:
        return 0.0, 0.0
    s = math.sqrt(a)
    # Newton correction: s + (a - s*s)/(2s), with the residual error-free.
    p, e = two_prod(s, s)
    residual = (a - p) - e
    return quick_two_sum(s, residual / (2.0 * s))


def dd_pow_3_2(a: float) -> DD:
    """a**1.5 for a >= 0 to dd accuracy (a * sqrt(a))."""
    return dd_mul_f(dd_sqrt(a), a)


def dd_inv_pow_3_2(a: float) -> DD:
    """a**(-1.5) for a > 0 to dd accuracy."""
    return dd_div((1.0, 0.0), dd_pow_3_2(a))


def dd_to_float(x: DD) -> float:
    return x[0] + x[1]


def dd_cos_sin(x: DD) -> Tuple[float, float]:
    """cos and sin of a dd angle.

    The high word goes through libm (whose argument reduction is exact for
    all finite doubles); the low word is applied as a second-order series
    correction. Accurate to ~1e-15 absolute even for |x| ~ 1e9 where
    ulp(x[0]) alone would be ~1e-7.
    """
    c = math.cos(x[0])
    s = math.sin(x[0])
    lo = x[1]
    # cos(hi+lo) = cos hi - lo sin hi - lo^2/2 cos hi + O(lo^3), same for sin.
    half_lo2 = 0.5 * lo * lo
    return (c - lo * s - half_lo2 * c, s + lo * c - half_lo2 * s)


def dd_rotation(x: DD) -> complex:
    """exp(i * x) for a dd angle, as a unit-modulus complex double."""
    c, s = dd_cos_sin(x)
    return complex(c, s)
