"""Coefficient models: the function a(x), its derivatives, and phase integrals.

The solver targets equations ``eps^2 * w''(x) + a(x) * w(x) = 0`` with a
smooth, strictly positive coefficient a. A `CoefficientModel` packages
everything the schemes need to know about a:

* derivative jets up to order 7 (the third-order scheme consumes a^(7)
  through the chain of quotient derivatives it builds),
* a certified positive lower bound ``a_floor``,
* optional closed-form antiderivatives of sqrt(a) and of the dispersive
  correction b(x) = -(1/(2 a^{1/4})) (a^{-1/4})'' — when both are present the
  oscillation phase can be computed exactly and the model is "exact-phase
  capable",
* optional double-double variants of those antiderivatives, used to keep the
  phase-to-epsilon ratio accurate when epsilon is very small.

Built-in models cover the two benchmark problems (linear coefficient
a(x) = x on [1, x_end]; exponential coefficient a(x) = e^x on [0, x_end]) and
the constant coefficient a = c used for degenerate-case checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

from .dd import (
    DD,
    dd_div_f,
    dd_inv_pow_3_2,
    dd_mul_f,
    dd_pow_3_2,
    dd_sqrt,
    dd_sub,
)
from .errors import ConfigError, DomainError, JetOrderError
from .jets import Jet

__all__ = ["CoefficientModel", "builtin_model", "jet", "MAX_JET_ORDER"]

#: Highest derivative order any scheme in this package requests.
MAX_JET_ORDER = 7

#: Relative slack accepted at the domain edges (covers grid-generation and
#: fixed-step integrator roundoff landing a hair outside).
_EDGE_SLACK = 1e-9


@dataclass(frozen=True)
class CoefficientModel:
    """A smooth positive coefficient a(x) on a closed interval.

    Attributes
    ----------
    name : str
        Identifier used in configs and output tables.
    domain : (float, float)
        Closed interval [x_lo, x_hi] on which a is defined.
    jet_provider : callable (x, order) -> Jet
        Returns the derivatives of a at x up to `order`.
    a_floor : float
        Certified lower bound: a(x) >= a_floor > 0 on the domain. Supplied by
        the model author; verified by sampling at solve time.
    antiderivative_sqrt_a : callable x -> float, optional
        Closed form of ``integral_{x_lo}^{x} sqrt(a(y)) dy``.
    antiderivative_b : callable x -> float, optional
        Closed form of ``integral_{x_lo}^{x} b(y) dy``.
    antiderivative_sqrt_a_dd, antiderivative_b_dd : callable x -> DD, optional
        Double-double versions of the two antiderivatives. Optional; exact
        phases fall back to the plain-double forms when absent.
    """

    name: str
    domain: Tuple[float, float]
    jet_provider: Callable[[float, int], Jet]
    a_floor: float
    antiderivative_sqrt_a: Optional[Callable[[float], float]] = None
    antiderivative_b: Optional[Callable[[float], float]] = None
    antiderivative_sqrt_a_dd: Optional[Callable[[float], DD]] = field(
        default=None, repr=False
    )
    antiderivative_b_dd: Optional[Callable[[float], DD]] = field(
        default=None, repr=False
    )

    def __post_init__(self) -> None:
        lo, hi = self.domain
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ConfigError(f"invalid domain {self.domain!r}")
        if not (self.a_floor > 0.0 and math.isfinite(self.a_floor)):
            raise ConfigError(f"a_floor must be positive, got {self.a_floor!r}")

    @property
    def exact_phase_capable(self) -> bool:
        """Whether both phase antiderivatives have closed forms."""
        return (
            self.antiderivative_sqrt_a is not None
            and self.antiderivative_b is not None
        )

    def contains(self, x: float) -> bool:
        lo, hi = self.domain
        slack = _EDGE_SLACK * max(1.0, abs(lo), abs(hi))
        return lo - slack <= x <= hi + slack

    def require_in_domain(self, x: float) -> None:
        if not self.contains(x):
            raise DomainError(
                f"x={x!r} outside domain [{self.domain[0]}, {self.domain[1]}] "
                f"of model '{self.name}'"
            )

    def a(self, x: float) -> float:
        """The coefficient value a(x)."""
        return jet(self, x, 0).value


def jet(model: CoefficientModel, x: float, order: int) -> Jet:
    """Derivatives of the model coefficient at x, up to `order` (<= 7).

    Parameters
    ----------
    model : CoefficientModel
    x : float
        Evaluation point, inside the model domain.
    order : int
        Highest derivative requested, between 0 and 7.

    Returns
    -------
    Jet
        ``[a(x), a'(x), ..., a^(order)(x)]`` at x.
    """
    if not 0 <= order <= MAX_JET_ORDER:
        raise JetOrderError(
            f"jet order must be in 0..{MAX_JET_ORDER}, got {order}"
        )
    model.require_in_domain(x)
    result = model.jet_provider(x, order)
    if result.order != order:
        raise JetOrderError(
            f"model '{model.name}' returned order {result.order}, "
            f"expected {order}"
        )
    return result


# ===== built-in models =====


def _linear_model(x_end: float) -> CoefficientModel:
    if not 1.0 < x_end <= 100.0:
        raise ConfigError(
            f"linear-coefficient model needs 1 < x_end <= 100, got {x_end}"
        )
    x0 = 1.0
    # integral of sqrt(y) from 1 to x: (2/3)(x^{3/2} - 1)
    # b(y) = -5/(32 y^{5/2});  integral from 1 to x: (5/48)(x^{-3/2} - 1)

    def anti_sqrt(x: float) -> float:
        return (2.0 / 3.0) * (x * math.sqrt(x) - 1.0)

    def anti_b(x: float) -> float:
        return (5.0 / 48.0) * (x ** (-1.5) - 1.0)

    def anti_sqrt_dd(x: float) -> DD:
        v = dd_sub(dd_pow_3_2(x), (1.0, 0.0))
        return dd_div_f(dd_mul_f(v, 2.0), 3.0)

    def anti_b_dd(x: float) -> DD:
        v = dd_sub(dd_inv_pow_3_2(x), (1.0, 0.0))
        return dd_div_f(dd_mul_f(v, 5.0), 48.0)

    return CoefficientModel(
        name="airy",
        domain=(x0, x_end),
        jet_provider=lambda x, order: Jet.variable(x, order),
        a_floor=x0,
        antiderivative_sqrt_a=anti_sqrt,
        antiderivative_b=anti_b,
        antiderivative_sqrt_a_dd=anti_sqrt_dd,
        antiderivative_b_dd=anti_b_dd,
    )


def _exponential_model(x_end: float) -> CoefficientModel:
    if not 0.0 < x_end <= 20.0:
        raise ConfigError(
            f"exponential-coefficient model needs 0 < x_end <= 20, got {x_end}"
        )

    def provider(x: float, order: int) -> Jet:
        ax = math.exp(x)
        return Jet((ax,) * (order + 1), x)

    def anti_sqrt(x: float) -> float:
        # integral of e^{y/2} from 0 to x
        return 2.0 * (math.exp(0.5 * x) - 1.0)

    def anti_b(x: float) -> float:
        # b(y) = -(1/32) e^{-y/2}; integral from 0 to x
        return (math.exp(-0.5 * x) - 1.0) / 16.0

    return CoefficientModel(
        name="exp",
        domain=(0.0, x_end),
        jet_provider=provider,
        a_floor=1.0,
        antiderivative_sqrt_a=anti_sqrt,
        antiderivative_b=anti_b,
    )


def _constant_model(c: float, x_lo: float, x_hi: float) -> CoefficientModel:
    if not (c > 0.0 and math.isfinite(c)):
        raise ConfigError(f"constant coefficient must be positive, got {c}")
    if not x_lo < x_hi:
        raise ConfigError(f"constant model needs x_lo < x_hi, got {x_lo}, {x_hi}")
    sqrt_c = math.sqrt(c)
    sqrt_c_dd = dd_sqrt(c)

    def anti_sqrt_dd(x: float) -> DD:
        return dd_mul_f(sqrt_c_dd, x - x_lo)

    return CoefficientModel(
        name="constant",
        domain=(x_lo, x_hi),
        jet_provider=lambda x, order: Jet.constant(c, x, order),
        a_floor=c,
        antiderivative_sqrt_a=lambda x: sqrt_c * (x - x_lo),
        antiderivative_b=lambda x: 0.0,
        antiderivative_sqrt_a_dd=anti_sqrt_dd,
        antiderivative_b_dd=lambda x: (0.0, 0.0),
    )


def builtin_model(name: str, **params) -> CoefficientModel:
    """Construct one of the built-in coefficient models.

    Parameters
    ----------
    name : {"airy", "exp", "constant"}
        ``"airy"``: a(x) = x on [1, x_end] (`x_end` parameter, default 2.0,
        at most 100). ``"exp"``: a(x) = e^x on [0, x_end] (default 1.0).
        ``"constant"``: a = c on [x_lo, x_hi] (defaults c=1.0 on [0, 1]).
    **params
        Model parameters as above.

    Returns
    -------
    CoefficientModel
    """
    known = {"airy", "exp", "constant"}
    if name not in known:
        raise ConfigError(
            f"unknown coefficient model {name!r}; expected one of {sorted(known)}"
        )
    if name == "airy":
        allowed = {"x_end"}
        extra = set(params) - allowed
        if extra:
            raise ConfigError(f"unknown parameters for 'airy': {sorted(extra)}")
        return _linear_model(float(params.get("x_end", 2.0)))
    if name == "exp":
        allowed = {"x_end"}
        extra = set(params) - allowed
        if extra:
            raise ConfigError(f"unknown parameters for 'exp': {sorted(extra)}")
        return _exponential_model(float(params.get("x_end", 1.0)))
    allowed = {"c", "x_lo", "x_hi"}
    extra = set(params) - allowed
    if extra:
        raise ConfigError(f"unknown parameters for 'constant': {sorted(extra)}")
    return _constant_model(
        float(params.get("c", 1.0)),
        float(params.get("x_lo", 0.0)),
        float(params.get("x_hi", 1.0)),
    )
