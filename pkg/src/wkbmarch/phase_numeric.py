"""Numerically tabulated phases for models without closed-form antiderivatives.

Two constructions of the approximate phase
``phi~(x) = phi~_1(x) - eps^2 phi~_2(x)`` (with ``phi~_1 ≈ ∫ sqrt(a)`` and
``phi~_2 ≈ ∫ b``):

* :func:`simpson_phase` — composite Simpson accumulation over the marching
  grid refined once (every node and midpoint), tabulation error O(h^4);
* :func:`chebyshev_phase` — Clenshaw–Curtis cumulative integrals on a
  Chebyshev–Lobatto grid of the whole interval, evaluated anywhere by
  barycentric interpolation; machine precision for analytic coefficients at
  modest node counts.

Both feed a :class:`~wkbmarch.wkb_core.PhaseModel` whose *derivatives* come
from the exact integrand ``sqrt(a) - eps^2 b`` — only phase values carry the
tabulation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .cheb import (
    antiderivative_coeffs,
    barycentric_interpolate,
    eval_series,
    lobatto_nodes,
    values_to_coeffs,
)
from .coeffs import CoefficientModel, jet
from .errors import ConfigError, DomainError
from .wkb_core import PhaseModel, beta, exact_phase

__all__ = ["NumericPhase", "simpson_phase", "chebyshev_phase"]


def _sqrt_a(model: CoefficientModel, x: float) -> float:
    return math.sqrt(jet(model, x, 0).value)


@dataclass(frozen=True)
class NumericPhase:
    """Tabulated approximate phase.

    Attributes
    ----------
    model : CoefficientModel
        Coefficient function the phase belongs to.
    epsilon : float
        Semiclassical parameter.
    mode : str
        ``"simpson"`` or ``"chebyshev"``.
    base_grid : tuple of float
        Points where ``phi~_1``/``phi~_2`` are tabulated. For the Simpson
        construction this is the marching grid refined once (all nodes and
        midpoints); for the spectral construction, the Lobatto grid.
    phi1_values, phi2_values : tuple of float
        Running integrals of ``sqrt(a)`` and of ``b``, vanishing at the first
        base point.
    interpolant : tuple or None
        For the spectral mode, ``(lo, hi)`` of the interval — evaluation runs
        barycentric interpolation of the tabulated antiderivative values.
        ``None`` for the Simpson mode, which only serves tabulated points.
    """

    model: CoefficientModel
    epsilon: float
    mode: str
    base_grid: Tuple[float, ...]
    phi1_values: Tuple[float, ...]
    phi2_values: Tuple[float, ...]
    interpolant: Optional[Tuple[float, float]] = None

    def phi(self, x: float) -> float:
        """``phi~(x) = phi~_1(x) - eps^2 phi~_2(x)``."""
        e2 = self.epsilon * self.epsilon
        if self.interpolant is not None:
            nodes = np.asarray(self.base_grid)
            p1 = barycentric_interpolate(nodes, np.asarray(self.phi1_values), x)
            p2 = barycentric_interpolate(nodes, np.asarray(self.phi2_values), x)
            return float(p1) - e2 * float(p2)
        k = self._lookup(x)
        return self.phi1_values[k] - e2 * self.phi2_values[k]

    def _lookup(self, x: float) -> int:
        grid = self.base_grid
        k = int(np.searchsorted(grid, x))
        tol = 1e-12 * max(1.0, abs(x))
        for cand in (k - 1, k, k + 1):
            if 0 <= cand < len(grid) and abs(grid[cand] - x) <= tol:
                return cand
        raise DomainError(
            f"phase tabulated on the marching grid only; x={x!r} is not a "
            "tabulated node or midpoint"
        )

    def max_error_vs_exact(self) -> float:
        """``max |phi~ - phi|`` over the base grid, when closed forms exist.

        Raises
        ------
        ConfigError
            If the model has no closed-form antiderivatives to compare with.
        """
        reference = exact_phase(self.model, self.epsilon, x0=self.base_grid[0])
        return max(
            abs(self.phi(x) - reference.phi(x)) for x in self.base_grid
        )

    def to_phase_model(self, phase_floor: float = 1e-12) -> PhaseModel:
        """Wrap the table as a phase model for the marching schemes."""
        return PhaseModel(
            self.model,
            self.epsilon,
            self.mode,
            self.base_grid[0],
            self.phi,
            None,
            phase_floor,
        )


def simpson_phase(model: CoefficientModel, grid, epsilon: float) -> NumericPhase:
    """Tabulate the phase by composite Simpson over half-steps.

    Parameters
    ----------
    grid : Grid or array-like
        The marching nodes. The tabulation grid is this grid refined once,
        so every marching node *and* midpoint carries a value; each half-step
        integral uses Simpson's rule (sampling the quarter points).
    """
    nodes = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    if nodes.ndim != 1 or nodes.shape[0] < 2:
        raise ConfigError("need at least two marching nodes")
    if not np.all(np.diff(nodes) > 0):
        raise ConfigError("marching nodes must be strictly increasing")
    base = np.empty(2 * nodes.shape[0] - 1)
    base[0::2] = nodes
    base[1::2] = 0.5 * (nodes[:-1] + nodes[1:])

    phi1 = [0.0]
    phi2 = [0.0]
    for lo, hi in zip(base[:-1], base[1:]):
        mid = 0.5 * (lo + hi)
        scale = (hi - lo) / 6.0
        phi1.append(
            phi1[-1]
            + scale
            * (_sqrt_a(model, lo) + 4.0 * _sqrt_a(model, mid) + _sqrt_a(model, hi))
        )
        phi2.append(
            phi2[-1]
            + scale
            * (beta(model, lo) + 4.0 * beta(model, mid) + beta(model, hi))
        )
    return NumericPhase(
        model=model,
        epsilon=float(epsilon),
        mode="simpson",
        base_grid=tuple(float(x) for x in base),
        phi1_values=tuple(phi1),
        phi2_values=tuple(phi2),
    )


def chebyshev_phase(
    model: CoefficientModel,
    interval: Tuple[float, float],
    epsilon: float,
    n_cheb: int,
) -> NumericPhase:
    """Spectral phase: Clenshaw–Curtis cumulative integrals on ``n_cheb`` points.

    The integrands ``sqrt(a)`` and ``b`` are sampled on the Lobatto grid of
    the whole interval, converted to Chebyshev series, integrated in
    coefficient space, and tabulated back at the grid; evaluation anywhere
    interpolates those antiderivative values barycentrically.
    """
    if n_cheb < 3:
        raise ConfigError(f"need at least 3 spectral points, got {n_cheb}")
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ConfigError(f"empty interval [{lo}, {hi}]")
    model.require_in_domain(lo)
    model.require_in_domain(hi)
    xs = lobatto_nodes(n_cheb - 1, lo, hi)
    t_nodes = (2.0 * xs - (lo + hi)) / (hi - lo)

    tables = []
    for f in (lambda y: _sqrt_a(model, y), lambda y: beta(model, y)):
        coeffs = values_to_coeffs(np.array([f(float(x)) for x in xs]))
        anti = antiderivative_coeffs(coeffs, lo, hi)
        tables.append(np.asarray(eval_series(anti, t_nodes), dtype=float))

    return NumericPhase(
        model=model,
        epsilon=float(epsilon),
        mode="chebyshev",
        base_grid=tuple(float(x) for x in xs),
        phi1_values=tuple(tables[0]),
        phi2_values=tuple(tables[1]),
        interpolant=(lo, hi),
    )
