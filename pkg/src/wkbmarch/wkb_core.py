"""Phase models and the analytic building blocks of the marching schemes.

For the oscillatory equation ``eps^2 phi'' + a(x) phi = 0`` with
``a >= a_floor > 0``, the second-order WKB approximation accumulates the
phase

    phi_eps(x) = integral from x0 to x of (sqrt(a) - eps^2 b) dy,

where the dispersive correction is

    b = -(1 / (2 a^{1/4})) (a^{-1/4})''
      = -(5/32) a^{-5/2} (a')^2 + (1/8) a^{-3/2} a''.

Repeated integration by parts of the oscillatory integrals behind the
schemes generates a ladder of coefficient functions

    b_0 = b / (2 phi'),     b_{p+1} = b_p' / (2 phi'),

auxiliary quotients built from them (``c0 … l0`` below), and the elementary
oscillatory special function

    h_p(x) = e^{ix} - sum_{k<p} (ix)^k / k!,

the Taylor remainder of ``e^{ix}``. This module computes all of these —
derivatives are propagated mechanically with jet arithmetic, and phases are
carried in double-double precision when the coefficient model supplies
extended-precision antiderivatives (the rotation ``e^{2 i phi / eps}`` is
exquisitely sensitive to phase error at small eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

from .coeffs import MAX_JET_ORDER, CoefficientModel, jet
from .dd import (
    DD,
    dd_div_f,
    dd_mul_f,
    dd_rotation,
    dd_sub,
    dd_to_float,
)
from .errors import ConfigError, JetOrderError, PhaseSlopeError

__all__ = [
    "AuxBundle",
    "NodeData",
    "PhaseModel",
    "exact_phase",
    "beta",
    "beta_p",
    "aux_bundle",
    "h_p",
    "phase_value",
    "phase_increment",
    "ensure_slope_positive",
]

#: Ladder depth: b_0 .. b_5 are available from an order-7 coefficient jet.
MAX_LADDER = 5


# ===== dispersive correction =====

def beta(model: CoefficientModel, x: float) -> float:
    """The dispersive phase correction b(x) from the order-2 jet of a.

    Evaluates the expanded closed form
    ``b = -(5/32) a^{-5/2} (a')^2 + (1/8) a^{-3/2} a''``.
    """
    a, da, dda = jet(model, x, 2).values
    return -(5.0 / 32.0) * a ** -2.5 * da * da + 0.125 * a ** -1.5 * dda


def _derived_jets(model: CoefficientModel, x: float, epsilon: float):
    """Order-5 jets of b and of the phase slope ``phi' = sqrt(a) - eps^2 b``."""
    aj = jet(model, x, MAX_JET_ORDER)
    u = aj.pow(-0.25)
    w = u.derivative_jet().derivative_jet()  # (a^{-1/4})'', order 5
    bj = -0.5 * (u.truncate(MAX_LADDER) * w)
    pj = aj.sqrt().truncate(MAX_LADDER) - (epsilon * epsilon) * bj
    return bj, pj


# ===== auxiliary coefficient functions =====

@dataclass(frozen=True)
class AuxBundle:
    """All ladder and quotient coefficients evaluated at one point.

    Attributes
    ----------
    b0 … b5 : float
        The integration-by-parts ladder ``b_0 = b/(2 phi')``,
        ``b_{p+1} = b_p'/(2 phi')``.
    c0, c1, d0, d1, e0, f0, f1, g0, kappa0, l0 : float
        Derived quotients:
        ``c0 = b^2 b0/(2 phi')``, ``c1 = c0'/(2 phi')``,
        ``d0 = c0/(2 phi')``, ``d1 = d0'/(2 phi')``, ``e0 = c1/(2 phi')``,
        ``f0 = b0/(2 phi')``, ``f1 = f0'/(2 phi')``, ``g0 = b1/(2 phi')``,
        ``kappa0 = b·b1/(2 phi')``, ``l0 = b·b0·b1/(2 phi')``.
    """

    b0: float
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    c0: float
    c1: float
    d0: float
    d1: float
    e0: float
    f0: float
    f1: float
    g0: float
    kappa0: float
    l0: float

    @property
    def b_ladder(self) -> Tuple[float, ...]:
        return (self.b0, self.b1, self.b2, self.b3, self.b4, self.b5)


def _build_aux(bj, pj) -> AuxBundle:
    two_pj = 2.0 * pj
    ladder = [bj / two_pj]
    for _ in range(MAX_LADDER):
        ladder.append(ladder[-1].derivative_jet() / two_pj)

    b0j, b1j = ladder[0], ladder[1]
    c0j = (bj * bj * b0j) / two_pj
    c1j = c0j.derivative_jet() / two_pj
    d0j = c0j / two_pj
    d1j = d0j.derivative_jet() / two_pj
    e0j = c1j / two_pj
    f0j = b0j / two_pj
    f1j = f0j.derivative_jet() / two_pj
    g0j = b1j / two_pj
    kappa0j = (bj * b1j) / two_pj
    l0j = (bj * b0j * b1j) / two_pj
    return AuxBundle(
        b0=ladder[0].value,
        b1=ladder[1].value,
        b2=ladder[2].value,
        b3=ladder[3].value,
        b4=ladder[4].value,
        b5=ladder[5].value,
        c0=c0j.value,
        c1=c1j.value,
        d0=d0j.value,
        d1=d1j.value,
        e0=e0j.value,
        f0=f0j.value,
        f1=f1j.value,
        g0=g0j.value,
        kappa0=kappa0j.value,
        l0=l0j.value,
    )


# ===== oscillatory remainder function =====

_MAX_TAIL_TERMS = 500


def h_p(p: int, x: float) -> complex:
    """Taylor remainder of e^{ix}: ``h_p(x) = e^{ix} - sum_{k<p} (ix)^k/k!``.

    For ``p = 0`` the sum is empty and ``h_0(x) = e^{ix}``. Satisfies
    ``|h_p(x)| <= min(|x|^p/p!, 2 |x|^{p-1}/(p-1)!)`` for ``p >= 1``.

    Small arguments (``|x| <= p + 1``) are summed as the tail series
    ``sum_{k>=p} (ix)^k/k!`` — subtracting the partial sum from ``e^{ix}``
    there would cancel catastrophically. Large arguments use the direct
    subtraction, where the remainder is of the same magnitude as the terms.
    """
    if p < 0:
        raise ValueError(f"need p >= 0, got {p}")
    x = float(x)
    z = 1j * x
    if abs(x) <= p + 1.0:
        term = z ** p / math.factorial(p)
        total = term
        k = p
        for _ in range(_MAX_TAIL_TERMS):
            k += 1
            term = term * z / k
            updated = total + term
            if updated == total:
                return total
            total = updated
        raise ArithmeticError(f"tail series for h_{p}({x}) did not converge")
    partial = 0.0j
    zk = 1.0 + 0.0j
    for k in range(p):
        partial += zk
        zk = zk * z / (k + 1)
    return complex(math.cos(x), math.sin(x)) - partial


# ===== phase models =====

@dataclass(frozen=True)
class NodeData:
    """Per-point bundle cached by a phase model.

    Attributes
    ----------
    x : float
        The point.
    b : float
        Dispersive correction b(x).
    aux : AuxBundle
        Ladder and quotient coefficients at x.
    phi : float
        Phase value accumulated from the model's reference point.
    phi_dd : DD
        The same phase in double-double precision (lo word 0 when the model
        has no extended-precision antiderivatives).
    rot : complex
        The rotation ``e^{2 i phi / eps}``.
    """

    x: float
    b: float
    aux: AuxBundle
    phi: float
    phi_dd: DD
    rot: complex


class PhaseModel:
    """The phase ``phi_eps`` and every derived coefficient the schemes need.

    Attributes
    ----------
    model : CoefficientModel
        Underlying coefficient function.
    epsilon : float
        Semiclassical parameter, in (0, 1).
    mode : str
        One of ``"exact"``, ``"simpson"``, ``"chebyshev"`` — how phase
        *values* are produced. The slope ``phi'`` and all higher derivatives
        always come from the exact integrand ``sqrt(a) - eps^2 b``, which is
        directly available whatever the value mode.
    x0 : float
        Reference point; ``phi(x0) = 0``.
    phase_floor : float
        Certified positive lower bound required of ``phi'`` wherever the
        marching schemes sample it.
    """

    def __init__(
        self,
        model: CoefficientModel,
        epsilon: float,
        mode: str,
        x0: float,
        phi_func: Callable[[float], float],
        phi_dd_func: Optional[Callable[[float], DD]] = None,
        phase_floor: float = 1e-12,
    ) -> None:
        if not 0.0 < epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {epsilon}")
        if mode not in ("exact", "simpson", "chebyshev"):
            raise ConfigError(f"unknown phase mode {mode!r}")
        model.require_in_domain(x0)
        self.model = model
        self.epsilon = float(epsilon)
        self.mode = mode
        self.x0 = float(x0)
        self.phase_floor = float(phase_floor)
        self._phi_func = phi_func
        self._phi_dd_func = phi_dd_func
        self._cache: Dict[float, NodeData] = {}

    # ----- phase values -----

    def phi(self, x: float) -> float:
        """Phase value ``phi_eps(x)`` (vanishes at x0)."""
        return self._phi_func(x)

    def phi_dd(self, x: float) -> DD:
        """Phase value in double-double precision (best available)."""
        if self._phi_dd_func is not None:
            return self._phi_dd_func(x)
        return (self._phi_func(x), 0.0)

    def phi_prime(self, x: float) -> float:
        """Phase slope ``sqrt(a) - eps^2 b`` from the exact integrand."""
        a = self.model.a(x)
        return math.sqrt(a) - self.epsilon * self.epsilon * beta(self.model, x)

    def phi_higher(self, x: float, k: int) -> float:
        """k-th derivative of the phase, 0 <= k <= 6."""
        if k == 0:
            return self.phi(x)
        _, pj = _derived_jets(self.model, x, self.epsilon)
        if k - 1 > pj.order:
            raise JetOrderError(f"phase derivative order {k} exceeds 6")
        return pj.derivative(k - 1)

    # ----- cached per-point data -----

    def node(self, x: float) -> NodeData:
        data = self._cache.get(x)
        if data is None:
            data = self._build_node(float(x))
            self._cache[x] = data
        return data

    def _build_node(self, x: float) -> NodeData:
        self.model.require_in_domain(x)
        bj, pj = _derived_jets(self.model, x, self.epsilon)
        if pj.value <= 0.0:
            raise PhaseSlopeError(x, pj.value, 0.0)
        aux = _build_aux(bj, pj)
        pdd = self.phi_dd(x)
        rot = dd_rotation(dd_div_f(dd_mul_f(pdd, 2.0), self.epsilon))
        return NodeData(
            x=x, b=bj.value, aux=aux, phi=dd_to_float(pdd), phi_dd=pdd, rot=rot
        )

    def osc_arg(self, nd_xi: NodeData, nd_eta: NodeData) -> float:
        """The oscillation argument ``2 (phi(eta) - phi(xi)) / eps``.

        The difference is taken in double-double precision before dividing —
        at small eps this argument is the accuracy bottleneck of every
        quadrature.
        """
        diff = dd_sub(nd_eta.phi_dd, nd_xi.phi_dd)
        return dd_to_float(dd_div_f(dd_mul_f(diff, 2.0), self.epsilon))


def exact_phase(
    model: CoefficientModel,
    epsilon: float,
    x0: Optional[float] = None,
    phase_floor: float = 1e-12,
) -> PhaseModel:
    """Phase model evaluated from the coefficient model's antiderivatives.

    Raises
    ------
    ConfigError
        If the model does not carry closed-form antiderivatives.
    """
    if not model.exact_phase_capable:
        raise ConfigError(
            f"model {model.name!r} has no closed-form antiderivatives; "
            "use a numerically tabulated phase instead"
        )
    ref = model.domain[0] if x0 is None else float(x0)
    model.require_in_domain(ref)
    e2 = epsilon * epsilon

    has_dd = (
        model.antiderivative_sqrt_a_dd is not None
        and model.antiderivative_b_dd is not None
    )
    if has_dd:
        s_ref = model.antiderivative_sqrt_a_dd(ref)
        t_ref = model.antiderivative_b_dd(ref)

        def phi_dd_func(x: float) -> DD:
            s = dd_sub(model.antiderivative_sqrt_a_dd(x), s_ref)
            t = dd_sub(model.antiderivative_b_dd(x), t_ref)
            return dd_sub(s, dd_mul_f(t, e2))

        def phi_func(x: float) -> float:
            return dd_to_float(phi_dd_func(x))

        return PhaseModel(
            model, epsilon, "exact", ref, phi_func, phi_dd_func, phase_floor
        )

    s_ref_f = model.antiderivative_sqrt_a(ref)
    t_ref_f = model.antiderivative_b(ref)

    def phi_float(x: float) -> float:
        return (model.antiderivative_sqrt_a(x) - s_ref_f) - e2 * (
            model.antiderivative_b(x) - t_ref_f
        )

    return PhaseModel(model, epsilon, "exact", ref, phi_float, None, phase_floor)


# ===== pointwise coefficient evaluators =====

def beta_p(x: float, p: int, phase: PhaseModel) -> float:
    """Ladder coefficient ``b_p(x)``, 0 <= p <= 5."""
    if not 0 <= p <= MAX_LADDER:
        raise JetOrderError(f"ladder index must lie in 0..{MAX_LADDER}, got {p}")
    return phase.node(x).aux.b_ladder[p]


def aux_bundle(x: float, phase: PhaseModel) -> AuxBundle:
    """All ladder and quotient coefficients at x."""
    return phase.node(x).aux


def phase_value(phase: PhaseModel, x: float) -> float:
    """Phase ``phi_eps(x)`` measured from the model's reference point."""
    return phase.phi(x)


def phase_increment(phase: PhaseModel, xi: float, eta: float) -> float:
    """Phase difference ``phi(eta) - phi(xi)`` from stored values."""
    return phase.phi(eta) - phase.phi(xi)


def ensure_slope_positive(phase: PhaseModel, points) -> None:
    """Hard check that ``phi'`` clears the floor at every sampled point.

    Raises
    ------
    PhaseSlopeError
        Naming the first offending point.
    """
    for x in points:
        slope = phase.phi_prime(x)
        if not slope >= phase.phase_floor:
            raise PhaseSlopeError(x, slope, phase.phase_floor)
