"""Oscillatory-integral approximations driving the marching schemes.

A step of the rotated system is governed by iterated integrals of the
oscillatory kernel ``n(y) = b(y) e^{2 i phi(y)/eps}``:

    m1(eta, xi) = ∫ n,    m2 = ∫ conj(n) m1,    m3 = ∫ n m2,

wrapped into 2×2 matrices ``M_p`` with a rigid conjugate structure (the
off-diagonal ``M_1``/``M_3``, the diagonal ``M_2``). The closed-form
approximations below replace those integrals at a cost independent of the
oscillation count: repeated integration by parts trades one factor of the
step size for one factor of eps per round (:func:`q1`), while Simpson-type
correction terms and the Taylor remainders ``h_p`` capture what the boundary
terms miss (:func:`q2`, :func:`q3`, and their cheaper simplified variants).

:func:`m_p_oracle` evaluates the exact iterated integrals by panel-wise
spectral integration — the independent ground truth the approximation orders
are verified against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .cheb import antiderivative_coeffs, eval_series, lobatto_nodes, values_to_coeffs
from .dd import dd_div_f, dd_mul_f, dd_rotation
from .errors import JetOrderError, OracleBudgetError
from .wkb_core import MAX_LADDER, NodeData, PhaseModel, beta, h_p

__all__ = [
    "Mat2",
    "simpson",
    "q1",
    "q1_matrix",
    "q2",
    "q2_matrix",
    "q3",
    "q3_matrix",
    "q2_simp",
    "q2_simp_matrix",
    "q3_simp",
    "q3_simp_matrix",
    "q2_weak",
    "m_p_oracle",
]


# ===== 2x2 complex matrices with the conjugate pattern =====

@dataclass(frozen=True)
class Mat2:
    """A 2×2 complex matrix, entry-addressed.

    The quadrature wrappers emit two rigid patterns: off-diagonal
    ``[[0, conj(q)], [q, 0]]`` and diagonal ``[[q, 0], [0, conj(q)]]``.
    Sums of such matrices with the identity keep the conjugate pattern
    ``[[alpha, conj(beta)], [beta, conj(alpha)]]``, which is closed under
    multiplication — this encodes preservation of real-valued waves.
    """

    a11: complex
    a12: complex
    a21: complex
    a22: complex

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0 + 0.0j, 0.0j, 0.0j, 1.0 + 0.0j)

    @classmethod
    def zero(cls) -> "Mat2":
        return cls(0.0j, 0.0j, 0.0j, 0.0j)

    @classmethod
    def off_diagonal(cls, q: complex) -> "Mat2":
        """``[[0, conj(q)], [q, 0]]``."""
        q = complex(q)
        return cls(0.0j, q.conjugate(), q, 0.0j)

    @classmethod
    def diagonal(cls, q: complex) -> "Mat2":
        """``[[q, 0], [0, conj(q)]]``."""
        q = complex(q)
        return cls(q, 0.0j, 0.0j, q.conjugate())

    @classmethod
    def conjugate_pattern(cls, alpha: complex, beta: complex) -> "Mat2":
        """``[[alpha, conj(beta)], [beta, conj(alpha)]]``."""
        alpha = complex(alpha)
        beta = complex(beta)
        return cls(alpha, beta.conjugate(), beta, alpha.conjugate())

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a21 + other.a21,
            self.a22 + other.a22,
        )

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 - other.a11,
            self.a12 - other.a12,
            self.a21 - other.a21,
            self.a22 - other.a22,
        )

    def scaled(self, c: complex) -> "Mat2":
        return Mat2(c * self.a11, c * self.a12, c * self.a21, c * self.a22)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def apply(self, v: Tuple[complex, complex]) -> Tuple[complex, complex]:
        return (
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        )

    def max_abs(self) -> float:
        return max(abs(self.a11), abs(self.a12), abs(self.a21), abs(self.a22))

    def as_array(self) -> np.ndarray:
        return np.array(
            [[self.a11, self.a12], [self.a21, self.a22]], dtype=complex
        )


# ===== Simpson's rule =====

def simpson(f: Callable[[float], float], xi: float, eta: float):
    """``(eta-xi)/6 (f(xi) + 4 f(mid) + f(eta))`` — exact through cubics."""
    if not xi < eta:
        raise ValueError(f"need xi < eta, got [{xi}, {eta}]")
    return (eta - xi) / 6.0 * (f(xi) + 4.0 * f(0.5 * (xi + eta)) + f(eta))


def _check_step(xi: float, eta: float) -> bool:
    """True when the step is degenerate (all quadratures vanish)."""
    if eta == xi:
        return True
    if eta < xi:
        raise ValueError(f"need xi <= eta, got [{xi}, {eta}]")
    return False


def _simpson_weighted(
    nxi: NodeData, nmid: NodeData, neta: NodeData, pick: Callable[[NodeData], float]
) -> float:
    width = neta.x - nxi.x
    return width / 6.0 * (pick(nxi) + 4.0 * pick(nmid) + pick(neta))


# ===== boundary-term quadrature (integration by parts) =====

def q1(P: int, Pt: int, xi: float, eta: float, phase: PhaseModel) -> complex:
    """Scalar boundary-term approximation of the first iterated integral.

    ``P`` rounds of integration by parts produce boundary terms gaining one
    factor eps each; ``Pt`` further rounds with the oscillation anchored at
    the left endpoint gain step-size factors through ``h_p``:

        -sum_{p=1}^{P} (i eps)^p [b_{p-1} e^{2 i phi/eps}]_{xi}^{eta}
        - e^{2 i phi(xi)/eps} sum_{p=1}^{Pt} (i eps)^{p+P}
          b_{p+P-1}(eta) h_p(2 s / eps),

    with ``s = phi(eta) - phi(xi)``. For ``P = 0`` the first sum is empty.
    """
    if P < 0 or Pt < 1:
        raise ValueError(f"need P >= 0 and Pt >= 1, got ({P}, {Pt})")
    if P + Pt - 1 > MAX_LADDER:
        raise JetOrderError(
            f"(P, Pt) = ({P}, {Pt}) needs ladder depth {P + Pt - 1} > {MAX_LADDER}"
        )
    if _check_step(xi, eta):
        return 0.0j
    nxi = phase.node(xi)
    neta = phase.node(eta)
    eps = phase.epsilon
    ieps = 1j * eps
    s2 = phase.osc_arg(nxi, neta)

    total = 0.0j
    for p in range(1, P + 1):
        bracket = (
            neta.aux.b_ladder[p - 1] * neta.rot
            - nxi.aux.b_ladder[p - 1] * nxi.rot
        )
        total -= ieps ** p * bracket
    for p in range(1, Pt + 1):
        total -= (
            nxi.rot * ieps ** (p + P) * neta.aux.b_ladder[p + P - 1] * h_p(p, s2)
        )
    return total


def q1_matrix(P: int, Pt: int, xi: float, eta: float, phase: PhaseModel) -> Mat2:
    return Mat2.off_diagonal(q1(P, Pt, xi, eta, phase))


# ===== second iterated integral =====

def q2(xi: float, eta: float, phase: PhaseModel) -> complex:
    """Simpson-plus-remainder approximation of the second iterated integral.

    Error against the exact integral: O(eps h^4 max(eps, h)).
    """
    if _check_step(xi, eta):
        return 0.0j
    nxi = phase.node(xi)
    neta = phase.node(eta)
    nmid = phase.node(0.5 * (xi + eta))
    eps = phase.epsilon
    s2 = phase.osc_arg(nxi, neta)
    s_n = 0.5 * eps * s2

    b0_xi, b1_xi = nxi.aux.b0, nxi.aux.b1
    b0_eta, b1_eta, b2_eta, b3_eta = (
        neta.aux.b0,
        neta.aux.b1,
        neta.aux.b2,
        neta.aux.b3,
    )
    qs_bb0 = _simpson_weighted(nxi, nmid, neta, lambda n: n.b * n.aux.b0)
    qs_bb1 = _simpson_weighted(nxi, nmid, neta, lambda n: n.b * n.aux.b1)

    total = -1j * eps * qs_bb0
    total -= eps ** 2 * (
        b0_xi * b0_eta * h_p(0, -s2) - b0_xi * b0_xi - qs_bb1
    )
    total += 1j * eps ** 3 * (b0_xi * b1_eta - b1_xi * b0_eta) * h_p(1, -s2)
    total += eps ** 4 * (
        (b0_xi + b0_eta) * b2_eta - b1_xi * b1_eta - 2.0 * b0_eta * b3_eta * s_n
    ) * h_p(2, -s2)
    total += 1j * eps ** 5 * (
        (b0_eta - b0_xi) * b3_eta - (b1_eta - b1_xi) * b2_eta
    ) * h_p(3, -s2)
    return total


def q2_matrix(xi: float, eta: float, phase: PhaseModel) -> Mat2:
    return Mat2.diagonal(q2(xi, eta, phase))


# ===== third iterated integral =====

def q3(xi: float, eta: float, phase: PhaseModel) -> complex:
    """Three-term approximation of the third iterated integral.

    Error against the exact integral: O(eps h^4).
    """
    if _check_step(xi, eta):
        return 0.0j
    nxi = phase.node(xi)
    neta = phase.node(eta)
    eps = phase.epsilon
    s2 = phase.osc_arg(nxi, neta)
    s_n = 0.5 * eps * s2
    width = eta - xi

    ax, ae = nxi.aux, neta.aux
    bb0_xi = nxi.b * ax.b0
    cross = ae.l0 - ax.b0 * ae.kappa0

    term1 = (
        -(eps ** 2)
        * (width / 2.0)
        * (ae.c0 + bb0_xi * ae.b0)
        * h_p(1, s2)
    )
    term2 = (
        -1j
        * eps ** 3
        * (
            0.5 * (ae.c1 * width + ae.d0 + bb0_xi * (ae.b1 * width + ae.f0))
            + ax.b0 * ae.b0 * ae.b0
            + 2.0 * s_n * cross
        )
        * h_p(2, s2)
    )
    term3 = (
        eps ** 4
        * (
            0.5 * (ae.e0 + ae.d1 + bb0_xi * (ae.g0 + ae.f1))
            + 2.0 * (ax.b0 * ae.b0 * ae.b1 + cross)
        )
        * h_p(3, s2)
    )
    return nxi.rot * (term1 + term2 + term3)


def q3_matrix(xi: float, eta: float, phase: PhaseModel) -> Mat2:
    return Mat2.off_diagonal(q3(xi, eta, phase))


# ===== simplified variants =====

def q2_simp(xi: float, eta: float, phase: PhaseModel) -> complex:
    """Simplified second-integral quadrature; error O(eps h^4)."""
    if _check_step(xi, eta):
        return 0.0j
    nxi = phase.node(xi)
    neta = phase.node(eta)
    nmid = phase.node(0.5 * (xi + eta))
    eps = phase.epsilon
    s2 = phase.osc_arg(nxi, neta)
    s_n = 0.5 * eps * s2

    b0_xi = nxi.aux.b0
    b0_eta, b1_eta, b2_eta = neta.aux.b0, neta.aux.b1, neta.aux.b2
    qs_bb0 = _simpson_weighted(nxi, nmid, neta, lambda n: n.b * n.aux.b0)

    total = -1j * eps * qs_bb0
    total -= eps ** 2 * b0_xi * b0_eta * h_p(1, -s2)
    total -= 1j * eps ** 3 * (
        b0_eta * (b1_eta - 2.0 * b2_eta * s_n) - b0_xi * b1_eta
    ) * h_p(2, -s2)
    total += eps ** 4 * (
        b2_eta * (b0_xi + b0_eta) - b1_eta * b1_eta
    ) * h_p(3, -s2)
    return total


def q2_simp_matrix(xi: float, eta: float, phase: PhaseModel) -> Mat2:
    return Mat2.diagonal(q2_simp(xi, eta, phase))


def q3_simp(xi: float, eta: float, phase: PhaseModel) -> complex:
    """Simplified third-integral quadrature; error O(h^3 min(eps, h))."""
    if _check_step(xi, eta):
        return 0.0j
    nxi = phase.node(xi)
    neta = phase.node(eta)
    eps = phase.epsilon
    s2 = phase.osc_arg(nxi, neta)
    s_n = 0.5 * eps * s2
    b0_eta = neta.aux.b0
    return (
        -2.0
        * nxi.rot
        * b0_eta ** 3
        * (eps ** 2 * s_n * h_p(2, s2) + 1j * eps ** 3 * h_p(3, s2))
    )


def q3_simp_matrix(xi: float, eta: float, phase: PhaseModel) -> Mat2:
    return Mat2.off_diagonal(q3_simp(xi, eta, phase))


def q2_weak(xi: float, eta: float, phase: PhaseModel) -> complex:
    """Trapezoid-plus-remainder second-integral quadrature (second-order scheme).

    ``-i eps (eta-xi)/2 [b b0(eta) + b b0(xi)]
    + (i eps)^2 b0(xi) b0(eta) h_1(-2s/eps)
    + (i eps)^3 b1(eta) (b0(eta) - b0(xi)) h_2(-2s/eps)``.
    """
    if _check_step(xi, eta):
        return 0.0j
    nxi = phase.node(xi)
    neta = phase.node(eta)
    eps = phase.epsilon
    s2 = phase.osc_arg(nxi, neta)

    total = (
        -1j
        * eps
        * ((eta - xi) / 2.0)
        * (neta.b * neta.aux.b0 + nxi.b * nxi.aux.b0)
    )
    total -= eps ** 2 * nxi.aux.b0 * neta.aux.b0 * h_p(1, -s2)
    total -= 1j * eps ** 3 * neta.aux.b1 * (neta.aux.b0 - nxi.aux.b0) * h_p(
        2, -s2
    )
    return total


# ===== brute-force oracle for the exact iterated integrals =====

_ORACLE_DEGREE = 16
_ORACLE_MAX_REFINE = 7
_ORACLE_PANEL_ANGLE = 1.2


def _oracle_pass(
    n_panels: int,
    xi: float,
    eta: float,
    b_of: Callable[[float], float],
    rot_of: Callable[[float], complex],
) -> Tuple[complex, complex, complex]:
    """One spectral sweep: cumulative m1, then m2, then m3 at eta."""
    edges = np.linspace(xi, eta, n_panels + 1)
    t_nodes = lobatto_nodes(_ORACLE_DEGREE)  # standard coordinate

    panel_nodes = []
    panel_n_vals = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs = lobatto_nodes(_ORACLE_DEGREE, lo, hi)
        vals = np.array([b_of(float(x)) * rot_of(float(x)) for x in xs])
        panel_nodes.append(xs)
        panel_n_vals.append(vals)

    def cumulative(integrand_panels):
        """Running integral tabulated at every panel node; returns per-panel
        arrays and the total at eta."""
        out = []
        running = 0.0j
        for (lo, hi), vals in zip(
            zip(edges[:-1], edges[1:]), integrand_panels
        ):
            anti = antiderivative_coeffs(values_to_coeffs(vals), lo, hi)
            at_nodes = eval_series(anti, t_nodes)
            out.append(at_nodes + running)
            running += eval_series(anti, 1.0)
        return out, running

    m1_panels, m1_eta = cumulative(panel_n_vals)
    m2_integrand = [
        np.conj(nv) * m1 for nv, m1 in zip(panel_n_vals, m1_panels)
    ]
    m2_panels, m2_eta = cumulative(m2_integrand)
    m3_integrand = [nv * m2 for nv, m2 in zip(panel_n_vals, m2_panels)]
    _, m3_eta = cumulative(m3_integrand)
    return m1_eta, m2_eta, m3_eta


def m_p_oracle(
    p: int, xi: float, eta: float, phase: PhaseModel, tol: float = 1e-13
) -> Mat2:
    """Exact iterated oscillatory integral by panel-wise spectral quadrature.

    The kernel ``n(y) = b(y) e^{2 i phi(y)/eps}`` is integrated cumulatively
    on panels short enough that each holds at most ~1.2 radians of rotation;
    panel counts double until two successive sweeps agree below ``tol`` in
    every one of m1, m2, m3.

    Raises
    ------
    OracleBudgetError
        If agreement is not reached within the refinement budget.
    """
    if p not in (1, 2, 3):
        raise ValueError(f"oracle depth must be 1, 2, or 3, got {p}")
    if _check_step(xi, eta):
        return Mat2.zero()

    model = phase.model
    eps = phase.epsilon

    def b_of(y: float) -> float:
        return beta(model, y)

    def rot_of(y: float) -> complex:
        return dd_rotation(dd_div_f(dd_mul_f(phase.phi_dd(y), 2.0), eps))

    angle = abs(phase.osc_arg(phase.node(xi), phase.node(eta)))
    n_panels = max(4, int(math.ceil(angle / _ORACLE_PANEL_ANGLE)))

    prev = None
    for _ in range(_ORACLE_MAX_REFINE):
        cur = _oracle_pass(n_panels, xi, eta, b_of, rot_of)
        if prev is not None and all(
            abs(c - q) <= tol for c, q in zip(cur, prev)
        ):
            m1, m2, m3 = cur
            if p == 1:
                return Mat2.off_diagonal(m1)
            if p == 2:
                return Mat2.diagonal(m2)
            return Mat2.off_diagonal(m3)
        prev = cur
        n_panels *= 2
    raise OracleBudgetError(
        f"iterated-integral oracle did not reach tol={tol} on "
        f"[{xi}, {eta}] within {_ORACLE_MAX_REFINE} refinements"
    )
