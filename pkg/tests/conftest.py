"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import math

import pytest

from wkbmarch.coeffs import builtin_model


def rel_err(got: complex, want: complex) -> float:
    """Relative error with a graceful absolute fallback near zero."""
    scale = max(abs(want), 1e-300)
    return abs(got - want) / scale


@pytest.fixture(scope="session")
def airy_model():
    return builtin_model("airy")


@pytest.fixture(scope="session")
def exp_model():
    return builtin_model("exp")


@pytest.fixture(scope="session")
def constant_model():
    return builtin_model("constant", c=1.0)


def log2_slope(hs, errs):
    """Least-squares slope of log(err) against log(h)."""
    import numpy as np

    lh = np.log10(np.asarray(hs, dtype=float))
    le = np.log10(np.asarray(errs, dtype=float))
    slope, _ = np.polyfit(lh, le, 1)
    return float(slope)


def assert_close(got, want, tol, label=""):
    err = rel_err(got, want)
    assert err <= tol, f"{label}: got {got!r}, want {want!r}, rel err {err:.3e}"


def fd_derivative(f, x: float, order: int = 1, scale: float = 1.0) -> float:
    """Central finite difference of `f` at x (order 1 or 2).

    Step chosen by the usual cube-root-of-machine-epsilon rule scaled by
    `scale`.
    """
    h = (2.2e-16) ** (1.0 / 3.0) * max(scale, abs(x), 1.0)
    if order == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    raise ValueError(order)
