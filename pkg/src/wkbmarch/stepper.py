"""Marching schemes and the frame transformations.

The wave ``(phi, eps phi')`` is first scaled into the U frame,

    u1 = a^{1/4} phi,
    u2 = (a^{1/4} · eps phi' + eps (a^{1/4})' · phi) / sqrt(a),

then rotated into the Z frame, ``Z = exp(-i Phi/eps) P U`` with the unitary
``P = (1/sqrt 2) [[i, 1], [1, i]]`` and ``Phi = diag(phi, -phi)``. In the Z
frame the dominant oscillation is analytically removed: Z drifts around its
initial value with O(eps^2) amplitude, and one cheap matrix per step —
``I + eps Q1 + eps^2 Q2 + eps^3 Q3`` in one of three flavors — advances it
across arbitrarily many wavelengths.

Methods
-------
WKB3   : full third-order step; global error O(eps^3 h^3 max(eps, h)).
WKB3S  : simplified third-order step; global error O(eps^3 h^3).
WKB2   : second-order step; global error O(eps^3 h^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

from .coeffs import CoefficientModel, jet
from .dd import dd_div_f, dd_rotation
from .errors import ConfigError
from .quadrature import (
    Mat2,
    q1,
    q2,
    q2_simp,
    q2_weak,
    q3,
    q3_simp,
)
from .wkb_core import PhaseModel, ensure_slope_positive

__all__ = [
    "MethodId",
    "State2",
    "Grid",
    "wave_to_U",
    "U_to_wave",
    "U_to_Z",
    "Z_to_U",
    "step_matrix",
    "march",
    "solve_ivp",
]

_SQRT_HALF = math.sqrt(0.5)


class MethodId(Enum):
    """The three marching schemes."""

    WKB2 = "wkb2"
    WKB3 = "wkb3"
    WKB3S = "wkb3s"

    @classmethod
    def parse(cls, name: str) -> "MethodId":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ConfigError(
                f"unknown method {name!r}; choose from "
                f"{', '.join(m.name for m in cls)}"
            ) from None


@dataclass(frozen=True)
class State2:
    """A complex 2-vector tagged with its frame and location.

    Attributes
    ----------
    components : (complex, complex)
        ``(phi, eps phi')`` in the wave frame, ``(u1, u2)`` in U,
        ``(z1, z2)`` in Z.
    frame : str
        One of ``"wave"``, ``"U"``, ``"Z"``.
    x : float
        Where the state lives.
    """

    components: Tuple[complex, complex]
    frame: str
    x: float

    def __post_init__(self) -> None:
        if self.frame not in ("wave", "U", "Z"):
            raise ConfigError(f"unknown frame {self.frame!r}")
        c = (complex(self.components[0]), complex(self.components[1]))
        object.__setattr__(self, "components", c)
        if not all(
            math.isfinite(v.real) and math.isfinite(v.imag) for v in c
        ):
            raise ValueError(f"non-finite state at x={self.x}: {c}")

    def norm(self) -> float:
        return math.hypot(abs(self.components[0]), abs(self.components[1]))


@dataclass(frozen=True)
class Grid:
    """Strictly increasing marching nodes.

    A single-node grid is permitted and makes every solve a no-op returning
    the initial data.
    """

    nodes: Tuple[float, ...]

    def __post_init__(self) -> None:
        nodes = tuple(float(x) for x in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if not nodes:
            raise ConfigError("a grid needs at least one node")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ConfigError("grid nodes must be strictly increasing")

    @classmethod
    def uniform(cls, lo: float, hi: float, n_steps: int) -> "Grid":
        if n_steps < 1:
            raise ConfigError(f"need at least one step, got {n_steps}")
        if not lo < hi:
            raise ConfigError(f"empty interval [{lo}, {hi}]")
        step = (hi - lo) / n_steps
        nodes = [lo + k * step for k in range(n_steps)] + [hi]
        return cls(tuple(nodes))

    @property
    def h_max(self) -> float:
        if len(self.nodes) == 1:
            return 0.0
        return max(b - a for a, b in zip(self.nodes, self.nodes[1:]))

    @property
    def n_steps(self) -> int:
        return len(self.nodes) - 1

    def midpoints(self) -> Tuple[float, ...]:
        return tuple(
            0.5 * (a + b) for a, b in zip(self.nodes, self.nodes[1:])
        )


# ===== frame transformations =====

def _quarter_root(model: CoefficientModel, x: float) -> Tuple[float, float]:
    """``a^{1/4}`` and its derivative ``(1/4) a^{-3/4} a'`` at x."""
    a, da = jet(model, x, 1).values
    root = a ** 0.25
    return root, 0.25 * a ** -0.75 * da


def wave_to_U(
    phi: complex,
    eps_dphi: complex,
    x: float,
    model: CoefficientModel,
    epsilon: float,
) -> State2:
    """Scale the wave pair into the U frame.

    ``u1 = a^{1/4} phi``; ``u2 = (a^{1/4} eps phi' + eps (a^{1/4})' phi)/sqrt(a)``.
    """
    root, droot = _quarter_root(model, x)
    sqrt_a = root * root
    u1 = root * phi
    u2 = (root * eps_dphi + epsilon * droot * phi) / sqrt_a
    return State2((u1, u2), "U", x)


def U_to_wave(
    state: State2, model: CoefficientModel, epsilon: float
) -> Tuple[complex, complex]:
    """Exact algebraic inverse of :func:`wave_to_U`."""
    if state.frame != "U":
        raise ConfigError(f"expected a U-frame state, got {state.frame!r}")
    root, droot = _quarter_root(model, state.x)
    sqrt_a = root * root
    u1, u2 = state.components
    phi = u1 / root
    eps_dphi = (sqrt_a * u2 - epsilon * droot * phi) / root
    return phi, eps_dphi


def _half_rotation(phase: PhaseModel, x: float) -> complex:
    """``e^{i phi(x)/eps}`` carried through double-double phase values."""
    return dd_rotation(dd_div_f(phase.phi_dd(x), phase.epsilon))


def U_to_Z(state: State2, x: float, phase: PhaseModel) -> State2:
    """Rotate into the frame with the dominant oscillation removed:
    ``Z = exp(-i Phi/eps) P U``, ``P = (1/sqrt 2)[[i, 1], [1, i]]``."""
    if state.frame != "U":
        raise ConfigError(f"expected a U-frame state, got {state.frame!r}")
    u1, u2 = state.components
    r = _half_rotation(phase, x)
    z1 = r.conjugate() * (1j * u1 + u2) * _SQRT_HALF
    z2 = r * (u1 + 1j * u2) * _SQRT_HALF
    return State2((z1, z2), "Z", x)


def Z_to_U(state: State2, x: float, phase: PhaseModel) -> State2:
    """Inverse rotation: ``U = P^{-1} exp(i Phi/eps) Z``,
    ``P^{-1} = (1/sqrt 2)[[-i, 1], [1, -i]]``."""
    if state.frame != "Z":
        raise ConfigError(f"expected a Z-frame state, got {state.frame!r}")
    z1, z2 = state.components
    r = _half_rotation(phase, x)
    w1 = r * z1
    w2 = r.conjugate() * z2
    u1 = (-1j * w1 + w2) * _SQRT_HALF
    u2 = (w1 - 1j * w2) * _SQRT_HALF
    return State2((u1, u2), "U", x)


# ===== one-step matrices and marching =====

def step_matrix(
    method: MethodId, xi: float, eta: float, phase: PhaseModel
) -> Mat2:
    """The one-step propagator ``I + eps Q1 + eps^2 Q2 + eps^3 Q3``.

    All three flavors produce the conjugate pattern
    ``[[alpha, conj(beta)], [beta, conj(alpha)]]`` exactly.
    """
    eps = phase.epsilon
    if method is MethodId.WKB3:
        alpha = 1.0 + eps ** 2 * q2(xi, eta, phase)
        beta_ = eps * q1(3, 3, xi, eta, phase) + eps ** 3 * q3(xi, eta, phase)
    elif method is MethodId.WKB3S:
        alpha = 1.0 + eps ** 2 * q2_simp(xi, eta, phase)
        beta_ = eps * q1(2, 3, xi, eta, phase) + eps ** 3 * q3_simp(
            xi, eta, phase
        )
    elif method is MethodId.WKB2:
        alpha = 1.0 + eps ** 2 * q2_weak(xi, eta, phase)
        beta_ = eps * q1(2, 2, xi, eta, phase)
    else:  # pragma: no cover - exhaustive enum
        raise ConfigError(f"unknown method {method!r}")
    return Mat2.conjugate_pattern(alpha, beta_)


def march(
    method: MethodId, grid: Grid, z0: State2, phase: PhaseModel
) -> List[State2]:
    """Advance a Z-frame state across the grid; returns all node states."""
    if z0.frame != "Z":
        raise ConfigError(f"marching needs a Z-frame state, got {z0.frame!r}")
    if z0.x != grid.nodes[0]:
        raise ConfigError(
            f"initial state lives at x={z0.x}, grid starts at {grid.nodes[0]}"
        )
    for x in grid.nodes:
        phase.model.require_in_domain(x)
    ensure_slope_positive(phase, grid.nodes + grid.midpoints())

    out = [z0]
    current = z0.components
    for xi, eta in zip(grid.nodes[:-1], grid.nodes[1:]):
        current = step_matrix(method, xi, eta, phase).apply(current)
        out.append(State2(current, "Z", eta))
    return out


def solve_ivp(
    method: MethodId,
    grid: Grid,
    phi0: complex,
    eps_dphi0: complex,
    phase: PhaseModel,
) -> List[Tuple[complex, complex]]:
    """Full pipeline: wave → U → Z, march, Z → U → wave at every node."""
    model = phase.model
    eps = phase.epsilon
    x_start = grid.nodes[0]
    u0 = wave_to_U(phi0, eps_dphi0, x_start, model, eps)
    z0 = U_to_Z(u0, x_start, phase)
    states = march(method, grid, z0, phase)
    out = []
    for state in states:
        u = Z_to_U(state, state.x, phase)
        out.append(U_to_wave(u, model, eps))
    return out
