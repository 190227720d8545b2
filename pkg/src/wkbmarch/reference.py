"""Ground-truth references: Airy/Bessel evaluators and a Runge-Kutta oracle.

The two benchmark coefficient models admit closed-form solutions of
``eps^2 phi'' + a(x) phi = 0``:

* ``a(x) = x``      -> Airy functions of argument ``-x / eps^(2/3)``;
* ``a(x) = exp(x)`` -> Bessel functions ``J/Y`` of argument ``(2/eps) e^(x/2)``.

Both function families are evaluated in-house: Maclaurin series (in
double-double arithmetic) or backward recurrence for moderate arguments,
trigonometric asymptotic expansions beyond a fixed switch point, with the
two branches overlapping to >= 12 common digits at the switch.  The standard
Wronskian and cross-product identities serve as implementation-independent
validity checks.  For arbitrary coefficients, :func:`rk_oracle` integrates
the oscillatory system brute-force on a sub-wavelength grid.

For very large oscillation arguments the naive phase ``(2/3) t^(3/2)`` loses
up to eight digits to rounding before the trig functions ever see it, so all
asymptotic phases are assembled in double-double arithmetic.

References: M. Abramowitz, I. A. Stegun, *Handbook of Mathematical
Functions*, ch. 9-10; W. Gautschi, SIAM Rev. 9 (1967), backward recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from .coeffs import CoefficientModel, jet
from .dd import (
    DD,
    dd_add,
    dd_cos_sin,
    dd_div_f,
    dd_mul,
    dd_mul_f,
    dd_pow_3_2,
    dd_to_float,
)
from .errors import ConfigError, DomainError, ReferenceBudgetError, WkbError

__all__ = [
    "ReferenceSolution",
    "airy_pair",
    "bessel_quad",
    "airy_exact_solution",
    "expx_exact_solution",
    "airy_reference",
    "expx_reference",
    "constant_reference",
    "rk_oracle",
]

# ===== constants =====

#: Validated argument range of :func:`airy_pair` / :func:`bessel_quad`.
AIRY_T_MIN = -1.0e6
AIRY_T_MAX = 5.0
BESSEL_Z_MAX = 1.0e7

#: Series/asymptotics switch points, placed where the branches overlap to
#: >= 12 common digits (checked by the cross tests).
AIRY_SWITCH = 8.0
BESSEL_SWITCH = 20.0

#: Hard cap on brute-force integration steps.
RK_STEP_BUDGET = 5_000_000

# Ai(0) = 3^(-2/3)/Gamma(2/3) and -Ai'(0) = 3^(-1/3)/Gamma(1/3) as
# double-double pairs; Bi(0) = sqrt(3) Ai(0), Bi'(0) = -sqrt(3) Ai'(0).
_C1: DD = (0.3550280538878172, 2.05233632436212e-17)
_C2: DD = (0.2588194037928068, -2.522243111610832e-17)
_SQRT3: DD = (1.7320508075688772, 1.0035084221806903e-16)
_INV_SQRT_PI = 0.5641895835477563
_EULER_GAMMA = 0.5772156649015329
_SQRT_HALF = math.sqrt(0.5)


# ===== reference solutions =====


@dataclass(frozen=True)
class ReferenceSolution:
    """A ground-truth solution evaluable anywhere on its interval.

    Attributes
    ----------
    evaluator : callable
        Map ``x -> (phi, eps * phi')`` as a complex pair.
    provenance : str
        One of ``"airy-exact"``, ``"bessel-exact"``, ``"constant-exact"``,
        ``"rk-oracle"``.
    """

    evaluator: Callable[[float], Tuple[complex, complex]] = field(repr=False)
    provenance: str

    def __call__(self, x: float) -> Tuple[complex, complex]:
        return self.evaluator(x)


# ===== Airy pair =====


def _airy_series(t: float):
    """Maclaurin evaluation of (Ai, Bi, Ai', Bi') in dd arithmetic.

    ``Ai = c1 f - c2 g`` and ``Bi = sqrt(3)(c1 f + c2 g)`` where ``f`` and
    ``g`` are the two standard entire solutions of ``y'' = t y``; all four
    series share the recurrence stride t^3.  Plain doubles would lose ~1e-10
    near |t| = 8 to alternating-term cancellation, hence dd.
    """
    td: DD = (float(t), 0.0)
    t3 = dd_mul(td, dd_mul(td, td))
    f: DD = (1.0, 0.0)
    f_term: DD = (1.0, 0.0)
    g: DD = td
    g_term: DD = td
    df: DD = dd_div_f(dd_mul(td, td), 2.0)  # f' = t^2/2 + ...
    df_term: DD = df
    dg: DD = (1.0, 0.0)
    dg_term: DD = (1.0, 0.0)
    for k in range(300):
        f_term = dd_div_f(dd_mul(f_term, t3), (3 * k + 2) * (3 * k + 3))
        f = dd_add(f, f_term)
        g_term = dd_div_f(dd_mul(g_term, t3), (3 * k + 3) * (3 * k + 4))
        g = dd_add(g, g_term)
        if k >= 1:
            df_term = dd_div_f(dd_mul(df_term, t3), (3 * k) * (3 * k + 2))
            df = dd_add(df, df_term)
        dg_term = dd_div_f(dd_mul(dg_term, t3), (3 * k + 1) * (3 * k + 3))
        dg = dd_add(dg, dg_term)
        largest = max(
            abs(f_term[0]), abs(g_term[0]), abs(df_term[0]), abs(dg_term[0])
        )
        if largest < 1e-40 * max(1.0, abs(f[0])):
            break

    def _ai(u: DD, v: DD) -> float:
        return dd_to_float(dd_add(dd_mul(_C1, u), dd_mul_f(dd_mul(_C2, v), -1.0)))

    def _bi(u: DD, v: DD) -> float:
        return dd_to_float(dd_mul(_SQRT3, dd_add(dd_mul(_C1, u), dd_mul(_C2, v))))

    return _ai(f, g), _bi(f, g), _ai(df, dg), _bi(df, dg)


def _airy_neg_asymptotic(z: float, zeta_dd: DD | None = None):
    """(Ai, Bi, Ai', Bi') at ``t = -z`` by the trigonometric expansions.

    The oscillation angle ``zeta = (2/3) z^(3/2)`` is carried in dd (callers
    that know ``zeta`` to better accuracy than ``z`` itself can pass it);
    the Poincare sums are truncated at their smallest term, which is
    ~``exp(-2 zeta)`` — below 1e-13 for every z past the switch point.
    """
    if zeta_dd is None:
        # Divide by 1.5 (exact in binary) rather than multiply by the
        # rounded 2/3, which alone would cost 4e-17 relative in the phase.
        zeta_dd = dd_div_f(dd_pow_3_2(z), 1.5)
    cos_z, sin_z = dd_cos_sin(zeta_dd)
    cos_s = (cos_z + sin_z) * _SQRT_HALF  # cos(zeta - pi/4)
    sin_s = (sin_z - cos_z) * _SQRT_HALF  # sin(zeta - pi/4)
    zeta = dd_to_float(zeta_dd)

    sum_u_even = sum_u_odd = sum_v_even = sum_v_odd = 0.0
    u = 1.0
    power = 1.0
    previous = math.inf
    for m in range(200):
        term_u = u * power
        if abs(term_u) >= previous:
            break
        previous = abs(term_u)
        v = u * (6 * m + 1) / (1 - 6 * m) if m else 1.0
        term_v = v * power
        sign = 1.0 if m % 4 in (0, 1) else -1.0
        if m % 2 == 0:
            sum_u_even += sign * term_u
            sum_v_even += sign * term_v
        else:
            sum_u_odd += sign * term_u
            sum_v_odd += sign * term_v
        u *= (6 * m + 5) * (6 * m + 3) * (6 * m + 1) / (216.0 * (2 * m + 1) * (m + 1))
        power /= zeta

    quarter_root = z**0.25
    amp = _INV_SQRT_PI / quarter_root
    damp = _INV_SQRT_PI * quarter_root
    ai = amp * (cos_s * sum_u_even + sin_s * sum_u_odd)
    bi = amp * (-sin_s * sum_u_even + cos_s * sum_u_odd)
    dai = damp * (sin_s * sum_v_even - cos_s * sum_v_odd)
    dbi = damp * (cos_s * sum_v_even + sin_s * sum_v_odd)
    return ai, bi, dai, dbi


def airy_pair(t: float) -> Tuple[float, float, float, float]:
    """``(Ai(t), Bi(t), Ai'(t), Bi'(t))`` for ``t`` in ``[-1e6, 5]``.

    Maclaurin series for ``|t| <= 8``, trigonometric asymptotic expansions
    for large negative ``t``; accuracy ~1e-13 relative to the function
    modulus throughout.

    Raises
    ------
    DomainError
        Outside the validated argument range.
    """
    t = float(t)
    if not (AIRY_T_MIN * (1.0 + 1e-12) <= t <= AIRY_T_MAX + 1e-12):
        raise DomainError(
            f"Airy evaluator validated for t in [{AIRY_T_MIN:g}, {AIRY_T_MAX:g}], "
            f"got {t!r}"
        )
    if abs(t) <= AIRY_SWITCH:
        return _airy_series(t)
    return _airy_neg_asymptotic(-t)


# ===== Bessel quadruple =====


def _bessel_miller(z: float):
    """(J0, J1, Y0, Y1) by backward recurrence plus the Neumann series.

    Start the three-term recurrence far enough above z that the minimal
    solution dominates; normalise with ``J0 + 2 sum J_{2k} = 1``.  The Y's
    come from the log-series in the accurately known J array, so no
    cancellation-prone ascending power series is ever summed.
    """
    n_top = int(z + 10.0 * math.sqrt(z + 4.0) + 24.0)
    if n_top % 2:
        n_top += 1
    js = [0.0] * (n_top + 1)
    j_above = 0.0
    j_here = 1e-300
    js[n_top] = j_here
    for n in range(n_top, 0, -1):
        j_below = (2.0 * n / z) * j_here - j_above
        j_above, j_here = j_here, j_below
        js[n - 1] = j_below
        if abs(j_below) > 1e250:
            j_above *= 1e-250
            j_here *= 1e-250
            for i in range(n - 1, n_top + 1):
                js[i] *= 1e-250
    norm = js[0] + 2.0 * sum(js[2 * k] for k in range(1, n_top // 2 + 1))
    js = [v / norm for v in js]

    j0, j1 = js[0], js[1]
    log_term = math.log(0.5 * z) + _EULER_GAMMA
    acc0 = 0.0
    sign = 1.0
    for k in range(1, n_top // 2 + 1):
        acc0 += sign * js[2 * k] / k
        sign = -sign
    y0 = (2.0 / math.pi) * (log_term * j0 + 2.0 * acc0)
    acc1 = 0.0
    sign = 1.0
    for k in range(1, (n_top - 1) // 2 + 1):
        acc1 += sign * (js[2 * k - 1] - js[2 * k + 1]) / k
        sign = -sign
    y1 = (2.0 / math.pi) * (log_term * j1 - j0 / z - acc1)
    return j0, j1, y0, y1


def _hankel_pq(nu: float, z: float) -> Tuple[float, float]:
    """Evenly/oddly indexed tails P, Q of the large-argument expansion."""
    four_nu2 = 4.0 * nu * nu
    p = 0.0
    q = 0.0
    coeff = 1.0
    power = 1.0
    previous = math.inf
    for m in range(200):
        term = coeff * power
        small = abs(term) < 1e-19
        if abs(term) >= previous and not small:
            break
        sign = 1.0 if m % 4 in (0, 1) else -1.0
        if m % 2 == 0:
            p += sign * term
        else:
            q += sign * term
        if small:
            break
        previous = abs(term)
        coeff *= (four_nu2 - (2 * m + 1) ** 2) / (8.0 * (m + 1))
        power /= z
    return p, q


def _bessel_hankel(z: float):
    cos_z, sin_z = math.cos(z), math.sin(z)
    amp = math.sqrt(1.0 / (math.pi * z))
    p0, q0 = _hankel_pq(0.0, z)
    p1, q1 = _hankel_pq(1.0, z)
    j0 = amp * ((cos_z + sin_z) * p0 + (cos_z - sin_z) * q0)
    y0 = amp * ((sin_z - cos_z) * p0 + (cos_z + sin_z) * q0)
    j1 = amp * ((sin_z - cos_z) * p1 + (sin_z + cos_z) * q1)
    y1 = amp * (-(sin_z + cos_z) * p1 + (sin_z - cos_z) * q1)
    return j0, j1, y0, y1


def bessel_quad(z: float) -> Tuple[float, float, float, float]:
    """``(J0(z), J1(z), Y0(z), Y1(z))`` for ``z`` in ``(0, 1e7]``.

    Backward recurrence below the switch point, Hankel asymptotic
    expansions above; accuracy ~1e-12 relative to the envelope
    ``sqrt(2/(pi z))``.

    Raises
    ------
    DomainError
        For ``z <= 0`` or beyond the validated range.
    """
    z = float(z)
    if not 0.0 < z <= BESSEL_Z_MAX * (1.0 + 1e-12):
        raise DomainError(
            f"Bessel evaluator validated for z in (0, {BESSEL_Z_MAX:g}], got {z!r}"
        )
    if z <= BESSEL_SWITCH:
        return _bessel_miller(z)
    return _bessel_hankel(z)


# ===== closed-form benchmark solutions =====


def airy_exact_solution(epsilon: float, x: float) -> Tuple[complex, complex]:
    """Exact solution pair for ``a(x) = x``.

    ``phi = Ai(-x eps^(-2/3)) + i Bi(-x eps^(-2/3))`` and
    ``eps phi' = -eps^(1/3) (Ai' + i Bi')`` at the same argument.  On the
    asymptotic branch the oscillation angle is rebuilt as
    ``(2/3) x^(3/2) / eps`` in dd straight from ``x`` and ``eps``, bypassing
    the rounding of ``eps^(2/3)`` (which would cost ~4e-13 relative phase at
    eps = 1e-3).
    """
    _check_epsilon(epsilon)
    if x <= 0.0:
        raise DomainError(f"coefficient x must stay positive, got x={x!r}")
    cbrt_eps = epsilon ** (1.0 / 3.0)
    t = -x / (cbrt_eps * cbrt_eps)
    if -t <= AIRY_SWITCH:
        ai, bi, dai, dbi = _airy_series(t)
    else:
        if -t > -AIRY_T_MIN * (1.0 + 1e-12):
            raise DomainError(
                f"Airy argument {t!r} beyond validated range at eps={epsilon!r}"
            )
        zeta_dd = dd_div_f(dd_div_f(dd_pow_3_2(x), 1.5), epsilon)
        ai, bi, dai, dbi = _airy_neg_asymptotic(-t, zeta_dd)
    return complex(ai, bi), -cbrt_eps * complex(dai, dbi)


@lru_cache(maxsize=64)
def _expx_anchor(epsilon: float):
    """Left-endpoint Bessel data and the solution denominator for a = e^x."""
    z0 = 2.0 / epsilon
    j0, j1, y0, y1 = bessel_quad(z0)
    denom = j0 * y1 - y0 * j1  # analytically -eps/pi, never zero
    if abs(denom) < 1e-300:
        raise WkbError(f"vanishing solution denominator at eps={epsilon!r}")
    return z0, j1, y1, denom


def expx_exact_solution(epsilon: float, x: float) -> Tuple[complex, complex]:
    """Exact solution pair for ``a(x) = e^x`` with data ``phi(0) = 1``,
    ``eps phi'(0) = 0``.

    With ``z = (2/eps) e^(x/2)`` and ``z0 = z(0)``:
    ``phi = [J0(z) Y1(z0) - Y0(z) J1(z0)] / D`` and
    ``eps phi' = e^(x/2) [J1(z0) Y1(z) - Y1(z0) J1(z)] / D`` where
    ``D = J0(z0) Y1(z0) - Y0(z0) J1(z0)``.
    """
    _check_epsilon(epsilon)
    z0, j1_0, y1_0, denom = _expx_anchor(float(epsilon))
    half_exp = math.exp(0.5 * x)
    j0, j1, y0, y1 = bessel_quad(z0 * half_exp)
    phi = (j0 * y1_0 - y0 * j1_0) / denom
    eps_dphi = half_exp * (j1_0 * y1 - y1_0 * j1) / denom
    return complex(phi), complex(eps_dphi)


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def airy_reference(epsilon: float) -> ReferenceSolution:
    """Wrap :func:`airy_exact_solution` at fixed ``epsilon``."""
    _check_epsilon(epsilon)
    return ReferenceSolution(
        evaluator=lambda x: airy_exact_solution(epsilon, x),
        provenance="airy-exact",
    )


def expx_reference(epsilon: float) -> ReferenceSolution:
    """Wrap :func:`expx_exact_solution` at fixed ``epsilon``."""
    _check_epsilon(epsilon)
    _expx_anchor(float(epsilon))  # fail fast if the anchor is out of range
    return ReferenceSolution(
        evaluator=lambda x: expx_exact_solution(epsilon, x),
        provenance="bessel-exact",
    )


def constant_reference(
    model: CoefficientModel,
    epsilon: float,
    phi0: complex,
    eps_dphi0: complex,
) -> ReferenceSolution:
    """Plane-wave solution for a constant coefficient ``a = c``.

    ``phi(x) = phi0 cos(w d) + (eps phi0' / sqrt(c)) sin(w d)`` with
    ``w = sqrt(c)/eps`` and ``d = x - x0``; exact up to rounding, so even
    the marching schemes' exactness for constant coefficients is testable.
    """
    _check_epsilon(epsilon)
    x0 = model.domain[0]
    c = jet(model, x0, 0).value
    root_c = math.sqrt(c)
    omega = root_c / epsilon
    phi0 = complex(phi0)
    eps_dphi0 = complex(eps_dphi0)

    def evaluate(x: float) -> Tuple[complex, complex]:
        angle = omega * (x - x0)
        cos_a, sin_a = math.cos(angle), math.sin(angle)
        phi = phi0 * cos_a + (eps_dphi0 / root_c) * sin_a
        eps_dphi = -root_c * phi0 * sin_a + eps_dphi0 * cos_a
        return phi, eps_dphi

    return ReferenceSolution(evaluator=evaluate, provenance="constant-exact")


# ===== brute-force oracle =====


def rk_oracle(
    model: CoefficientModel,
    epsilon: float,
    interval: Tuple[float, float],
    phi0: complex,
    eps_dphi0: complex,
    steps_per_wavelength: int = 500,
) -> ReferenceSolution:
    """Classical fourth-order integration on a sub-wavelength grid.

    The first-order system for ``y = (phi, eps phi')`` is marched with the
    fixed step ``h_ref = eps * 2 pi / (sqrt(max a) * steps_per_wavelength)``;
    the returned evaluator serves stored nodes directly and reaches any
    other point by one partial step from the node to its left.

    Raises
    ------
    ConfigError
        For ``eps < 1e-3`` (cost grows like 1/eps) or fewer than 20 steps
        per wavelength.
    ReferenceBudgetError
        When the interval needs more than ``RK_STEP_BUDGET`` steps.
    """
    if epsilon < 1e-3 or epsilon >= 1.0:
        raise ConfigError(
            f"brute-force oracle supports eps in [1e-3, 1), got {epsilon!r}"
        )
    if steps_per_wavelength < 20:
        raise ConfigError(
            f"need >= 20 steps per wavelength, got {steps_per_wavelength}"
        )
    x_lo, x_hi = float(interval[0]), float(interval[1])
    if not x_lo < x_hi:
        raise ConfigError(f"empty integration interval [{x_lo}, {x_hi}]")
    model.require_in_domain(x_lo)
    model.require_in_domain(x_hi)

    a_max = max(model.a(float(x)) for x in np.linspace(x_lo, x_hi, 257))
    h_ref = epsilon * 2.0 * math.pi / (math.sqrt(a_max) * steps_per_wavelength)
    n_steps = max(1, math.ceil((x_hi - x_lo) / h_ref))
    if n_steps > RK_STEP_BUDGET:
        raise ReferenceBudgetError(
            f"interval [{x_lo}, {x_hi}] at eps={epsilon!r} needs {n_steps} "
            f"steps, budget is {RK_STEP_BUDGET}"
        )
    h = (x_hi - x_lo) / n_steps

    inv_eps = 1.0 / epsilon
    a_of = model.a

    def rk4(x: float, y1: complex, y2: complex, step: float):
        k1_1 = y2 * inv_eps
        k1_2 = -a_of(x) * y1 * inv_eps
        xm = x + 0.5 * step
        k2_1 = (y2 + 0.5 * step * k1_2) * inv_eps
        k2_2 = -a_of(xm) * (y1 + 0.5 * step * k1_1) * inv_eps
        k3_1 = (y2 + 0.5 * step * k2_2) * inv_eps
        k3_2 = -a_of(xm) * (y1 + 0.5 * step * k2_1) * inv_eps
        xe = x + step
        k4_1 = (y2 + step * k3_2) * inv_eps
        k4_2 = -a_of(xe) * (y1 + step * k3_1) * inv_eps
        sixth = step / 6.0
        return (
            y1 + sixth * (k1_1 + 2.0 * (k2_1 + k3_1) + k4_1),
            y2 + sixth * (k1_2 + 2.0 * (k2_2 + k3_2) + k4_2),
        )

    xs = np.empty(n_steps + 1)
    phis = np.empty(n_steps + 1, dtype=complex)
    derivs = np.empty(n_steps + 1, dtype=complex)
    y1, y2 = complex(phi0), complex(eps_dphi0)
    xs[0], phis[0], derivs[0] = x_lo, y1, y2
    for k in range(n_steps):
        x = x_lo + k * h
        y1, y2 = rk4(x, y1, y2, h)
        xs[k + 1] = x_lo + (k + 1) * h
        phis[k + 1] = y1
        derivs[k + 1] = y2
    xs[-1] = x_hi

    def evaluate(x: float) -> Tuple[complex, complex]:
        tol = 1e-12 * max(1.0, abs(x))
        if not (x_lo - tol <= x <= x_hi + tol):
            raise DomainError(
                f"x={x!r} outside the integrated interval [{x_lo}, {x_hi}]"
            )
        k = int(np.searchsorted(xs, x))
        for cand in (k - 1, k):
            if 0 <= cand <= n_steps and abs(xs[cand] - x) <= tol:
                return complex(phis[cand]), complex(derivs[cand])
        left = min(max(k - 1, 0), n_steps - 1)
        return rk4(float(xs[left]), complex(phis[left]), complex(derivs[left]),
                   float(x - xs[left]))

    return ReferenceSolution(evaluator=evaluate, provenance="rk-oracle")
