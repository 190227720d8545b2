"""Chebyshev–Lobatto utilities: nodes, series transforms, antiderivatives,
and barycentric interpolation.

These are the spectral building blocks used for cumulative integration —
phase tables over a whole interval and panel-wise integration of oscillatory
integrands. Everything works in the standard coordinate ``t ∈ [-1, 1]``; an
affine map carries results to a physical interval ``[lo, hi]``. Node arrays
are ascending.

Notes
-----
Standard material; see L. N. Trefethen, *Spectral Methods in MATLAB* (SIAM,
2000) and Berrut & Trefethen, "Barycentric Lagrange interpolation", SIAM
Rev. 46 (2004).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "lobatto_nodes",
    "values_to_coeffs",
    "eval_series",
    "antiderivative_coeffs",
    "barycentric_interpolate",
]


def lobatto_nodes(n: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Ascending Chebyshev–Lobatto points mapped to [lo, hi].

    Parameters
    ----------
    n : int
        Polynomial degree; ``n + 1`` nodes are returned, endpoints included.

    Notes
    -----
    Uses the sine form ``t_k = sin(pi (2k - n) / (2n))`` so the node set is
    exactly symmetric about the midpoint.
    """
    if n < 1:
        raise ValueError(f"need degree >= 1, got {n}")
    k = np.arange(n + 1)
    t = np.sin(np.pi * (2 * k - n) / (2 * n))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


def values_to_coeffs(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients of the interpolant through Lobatto samples.

    Parameters
    ----------
    values : array
        Samples at the ascending nodes from :func:`lobatto_nodes`; real or
        complex.

    Returns
    -------
    array
        Coefficients ``c`` with ``p(t) = sum c_j T_j(t)``; exact (up to
        roundoff) whenever the sampled function is a polynomial of degree
        ``<= n``. Computed by the explicit DCT-I cosine matrix — the node
        counts used here are far too small for an FFT to matter.
    """
    v = np.asarray(values)
    n = v.shape[0] - 1
    if n < 1:
        raise ValueError("need at least two samples")
    k = np.arange(n + 1)
    # cosine matrix indexed in the standard (descending-node) order
    mat = np.cos(np.pi * np.outer(k, k) / n)
    weighted = v[::-1] * np.where((k == 0) | (k == n), 1.0, 2.0)
    coeffs = (mat @ weighted) / n
    coeffs[0] *= 0.5
    coeffs[n] *= 0.5
    return coeffs


def eval_series(coeffs: np.ndarray, t):
    """Evaluate ``sum c_j T_j(t)`` by the Clenshaw recurrence.

    ``t`` may be a scalar or array in the standard coordinate [-1, 1].
    """
    t = np.asarray(t, dtype=float)
    dtype = np.result_type(np.asarray(coeffs).dtype, float)
    bk1 = np.zeros(t.shape, dtype=dtype)
    bk2 = np.zeros(t.shape, dtype=dtype)
    for c in coeffs[:0:-1]:
        bk1, bk2 = c + 2.0 * t * bk1 - bk2, bk1
    out = coeffs[0] + t * bk1 - bk2
    return out[()] if out.ndim == 0 else out


def antiderivative_coeffs(coeffs: np.ndarray, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
    """Coefficients of the running integral from the left endpoint.

    Given ``p(x) = sum c_j T_j(t(x))`` on [lo, hi], returns coefficients
    ``A`` (length ``len(coeffs) + 1``) with
    ``F(x) = ∫_lo^x p = sum A_j T_j(t(x))`` and ``F(lo) = 0``.

    The coefficient recurrence is ``A_k = (c~_{k-1} - c_{k+1}) (hi-lo)/2 / (2k)``
    for ``k >= 1`` with ``c~_0 = 2 c_0``, then ``A_0`` fixed by the left-edge
    condition using ``T_k(-1) = (-1)^k``.
    """
    c = np.asarray(coeffs)
    n = c.shape[0] - 1
    half = 0.5 * (hi - lo)
    padded = np.concatenate([c, np.zeros(2, dtype=c.dtype)])
    padded = padded.astype(np.result_type(c.dtype, float))
    padded[0] *= 2.0
    k = np.arange(1, n + 2)
    out = np.zeros(n + 2, dtype=padded.dtype)
    out[1:] = half * (padded[k - 1] - padded[k + 1]) / (2.0 * k)
    out[0] = -np.sum(out[1:] * (-1.0) ** k)
    return out


def barycentric_interpolate(nodes: np.ndarray, values: np.ndarray, x):
    """Barycentric interpolation through Lobatto samples.

    Parameters
    ----------
    nodes, values : arrays
        Ascending Lobatto nodes and the samples there.
    x : scalar or array
        Evaluation points. A point that coincides with a node returns the
        tabulated value exactly (guarding the 0/0 in the barycentric form).

    Notes
    -----
    Chebyshev–Lobatto barycentric weights are ``(-1)^j`` with the end weights
    halved; any common scaling cancels in the quotient.
    """
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values)
    n = nodes.shape[0] - 1
    w = (-1.0) ** np.arange(n + 1)
    w[0] *= 0.5
    w[n] *= 0.5

    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs)
    out = np.empty(flat.shape, dtype=np.result_type(values.dtype, float))
    for i, xi in enumerate(flat):
        diff = xi - nodes
        hit = np.nonzero(diff == 0.0)[0]
        if hit.size:
            out[i] = values[hit[0]]
        else:
            q = w / diff
            out[i] = (q @ values) / q.sum()
    return out[0] if xs.ndim == 0 else out.reshape(xs.shape)
