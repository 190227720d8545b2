"""Tests for the frame transformations, one-step matrices, and grid marching.

Reference-solution comparisons (Airy / Bessel testbeds) live in the
acceptance suite; here the schemes are validated against the iterated-
integral oracle, against closed-form degenerate cases, and against their
own structural invariants.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wkbmarch.coeffs import builtin_model
from wkbmarch.errors import ConfigError, PhaseSlopeError
from wkbmarch.quadrature import Mat2, m_p_oracle
from wkbmarch.stepper import (
    Grid,
    MethodId,
    State2,
    U_to_Z,
    U_to_wave,
    Z_to_U,
    march,
    solve_ivp,
    step_matrix,
    wave_to_U,
)
from wkbmarch.wkb_core import exact_phase

from conftest import log2_slope

ALL_METHODS = (MethodId.WKB2, MethodId.WKB3, MethodId.WKB3S)

finite_complex = st.complex_numbers(
    max_magnitude=10.0, allow_nan=False, allow_infinity=False
)


@pytest.fixture(scope="module")
def airy_model():
    return builtin_model("airy")


@pytest.fixture(scope="module")
def airy_phase(airy_model):
    return exact_phase(airy_model, 0.1)


# ===== MethodId =====


def test_method_parse_accepts_aliases():
    assert MethodId.parse("wkb2") is MethodId.WKB2
    assert MethodId.parse("WKB3") is MethodId.WKB3
    assert MethodId.parse("wkb3s") is MethodId.WKB3S
    assert MethodId.parse("WKB3S") is MethodId.WKB3S


def test_method_parse_rejects_unknown():
    with pytest.raises(ConfigError):
        MethodId.parse("wkb4")


# ===== State2 and Grid =====


def test_state_validates_frame_and_entries():
    State2((1.0, 2.0), "wave", 0.0)
    with pytest.raises(ConfigError):
        State2((1.0, 2.0), "banana", 0.0)
    with pytest.raises(ValueError):
        State2((float("nan"), 0.0), "U", 0.0)
    with pytest.raises(ValueError):
        State2((0.0, complex(0.0, float("inf"))), "Z", 0.0)


def test_grid_uniform_and_statistics():
    g = Grid.uniform(1.0, 2.0, 4)
    assert g.nodes == (1.0, 1.25, 1.5, 1.75, 2.0)
    assert g.n_steps == 4
    assert g.h_max == pytest.approx(0.25, abs=1e-15)
    assert g.midpoints() == pytest.approx([1.125, 1.375, 1.625, 1.875])


def test_grid_validation():
    with pytest.raises(ConfigError):
        Grid(())
    with pytest.raises(ConfigError):
        Grid((1.0, 1.0))
    with pytest.raises(ConfigError):
        Grid((2.0, 1.0))
    single = Grid((1.5,))
    assert single.h_max == 0.0 and single.n_steps == 0


# ===== wave <-> U =====


def test_wave_to_u_constant_coefficient_is_identity():
    model = builtin_model("constant", c=1.0)
    u = wave_to_U(1.0, 0.0, 0.3, model, 0.1)
    assert u.frame == "U"
    assert u.components == (1.0 + 0.0j, 0.0 + 0.0j)


def test_wave_to_u_airy_reference_values(airy_model):
    # At x = 1 with (phi, eps phi') = (1, 0): u1 = 1 and
    # u2 = eps * d/dx(x^{1/4})|_1 = eps / 4 = 0.025.
    u = wave_to_U(1.0, 0.0, 1.0, airy_model, 0.1)
    assert u.components[0] == pytest.approx(1.0, abs=1e-15)
    assert u.components[1] == pytest.approx(0.025, abs=1e-15)


@given(phi=finite_complex, dphi=finite_complex, alpha=finite_complex)
def test_wave_to_u_linearity(phi, dphi, alpha):
    model = builtin_model("airy")
    u = wave_to_U(phi, dphi, 1.3, model, 0.1)
    u_scaled = wave_to_U(alpha * phi, alpha * dphi, 1.3, model, 0.1)
    for a, b in zip(u_scaled.components, u.components):
        assert abs(a - alpha * b) <= 1e-12 * max(1.0, abs(alpha) * abs(b))


@given(phi=finite_complex, dphi=finite_complex)
def test_wave_u_roundtrip(phi, dphi):
    model = builtin_model("airy")
    u = wave_to_U(phi, dphi, 1.7, model, 0.1)
    phi2, dphi2 = U_to_wave(u, model, 0.1)
    assert abs(phi2 - phi) <= 1e-13 * max(1.0, abs(phi))
    assert abs(dphi2 - dphi) <= 1e-13 * max(1.0, abs(dphi))


def test_u_to_wave_rejects_wrong_frame(airy_model, airy_phase):
    z = State2((1.0, 1.0), "Z", 1.0)
    with pytest.raises(ConfigError):
        U_to_wave(z, airy_model, 0.1)
    with pytest.raises(ConfigError):
        U_to_Z(z, 1.0, airy_phase)
    u = State2((1.0, 1.0), "U", 1.0)
    with pytest.raises(ConfigError):
        Z_to_U(u, 1.0, airy_phase)


# ===== U <-> Z =====


@settings(max_examples=100)
@given(u1=finite_complex, u2=finite_complex)
def test_u_z_roundtrip_and_norm(u1, u2):
    model = builtin_model("airy")
    ph = exact_phase(model, 0.1)
    u = State2((u1, u2), "U", 1.6)
    z = U_to_Z(u, 1.6, ph)
    assert z.frame == "Z"
    # Unitarity: the transform is a rotation composed with a unitary mixer.
    assert abs(z.norm() - u.norm()) <= 1e-15 * max(1.0, u.norm())
    back = Z_to_U(z, 1.6, ph)
    # The mixer couples the components, so roundoff scales with the vector
    # norm rather than each entry alone.
    for a, b in zip(back.components, u.components):
        assert abs(a - b) <= 1e-15 * max(1.0, u.norm())


def test_z_at_anchor_is_mixer_times_u(airy_phase):
    # phi(x0) = 0, so the rotation factor is exactly 1 and Z0 = P U0 with
    # P = (1/sqrt2) [[i, 1], [1, i]].
    u1, u2 = 0.3 - 0.7j, -1.1 + 0.2j
    z = U_to_Z(State2((u1, u2), "U", 1.0), 1.0, airy_phase)
    r = math.sqrt(0.5)
    want1 = (1j * u1 + u2) * r
    want2 = (u1 + 1j * u2) * r
    assert abs(z.components[0] - want1) <= 1e-16 * max(1.0, abs(want1))
    assert abs(z.components[1] - want2) <= 1e-16 * max(1.0, abs(want2))


# ===== step matrices =====


def test_step_matrix_is_identity_when_b_vanishes():
    model = builtin_model("constant", c=2.0)
    ph = exact_phase(model, 0.125)
    for meth in ALL_METHODS:
        A = step_matrix(meth, 0.1, 0.6, ph)
        assert (A.a11, A.a12, A.a21, A.a22) == (1.0, 0.0, 0.0, 1.0)


def test_step_matrix_departure_scales_like_eps_squared(airy_model):
    # ||step - I|| is dominated by eps * Q1 = O(eps^2 * stuff): fitted
    # eps-slope at fixed h must be >= 1.7.
    h = 0.1
    eps_list = [2.0**-k for k in range(3, 8)]
    for meth in ALL_METHODS:
        norms = []
        for eps in eps_list:
            ph = exact_phase(airy_model, eps)
            A = step_matrix(meth, 1.0, 1.0 + h, ph)
            norms.append((A - Mat2.identity()).max_abs())
        assert log2_slope(eps_list, norms) >= 1.7


def test_wkb3_one_step_consistency_with_oracle(airy_model):
    # || (I + eps M1 + eps^2 M2 + eps^3 M3) - step || <= C eps^3 h^4 max(eps,h);
    # C carries the large b_5-derivative factor of the first-kind quadrature.
    for eps, h in ((0.1, 0.1), (0.1, 0.05), (0.05, 0.1), (0.2, 0.2)):
        ph = exact_phase(airy_model, eps)
        A = step_matrix(MethodId.WKB3, 1.0, 1.0 + h, ph)
        ref = Mat2.identity()
        for p, w in ((1, eps), (2, eps**2), (3, eps**3)):
            ref = ref + m_p_oracle(p, 1.0, 1.0 + h, ph, 1e-14).scaled(w)
        assert (A - ref).max_abs() <= 50.0 * eps**3 * h**4 * max(eps, h)


def test_step_matrix_rejects_reversed_cell(airy_phase):
    with pytest.raises(ValueError):
        step_matrix(MethodId.WKB3, 1.2, 1.1, airy_phase)


# ===== march =====


def test_march_no_coupling_keeps_state_exactly():
    model = builtin_model("constant", c=1.0)
    ph = exact_phase(model, 0.25)
    z0 = State2((0.4 + 0.1j, 0.4 - 0.1j), "Z", 0.0)
    out = march(MethodId.WKB3S, Grid.uniform(0.0, 1.0, 8), z0, ph)
    assert len(out) == 9
    for state in out:
        assert state.components == z0.components


def test_march_z_drift_shrinks_like_eps_squared(airy_model):
    # The rotated unknown is eps^2-close to its initial value uniformly on
    # the interval; the scheme output inherits that with fitted slope >= 1.8.
    grid = Grid.uniform(1.0, 2.0, 16)
    eps_list = [2.0**-k for k in range(3, 8)]
    drifts = []
    for eps in eps_list:
        ph = exact_phase(airy_model, eps)
        u0 = wave_to_U(1.0, 0.0, 1.0, airy_model, eps)
        z0 = U_to_Z(u0, 1.0, ph)
        zs = march(MethodId.WKB3, grid, z0, ph)
        drifts.append(
            max(
                max(
                    abs(s.components[0] - z0.components[0]),
                    abs(s.components[1] - z0.components[1]),
                )
                for s in zs
            )
        )
    assert log2_slope(eps_list, drifts) >= 1.8


def test_march_preserves_conjugate_pair(airy_phase):
    # Conjugate-pattern step matrices map (z, conj z) to (z', conj z'); in
    # IEEE arithmetic the defect is exactly zero, asserted here to 1e-14.
    z = 0.8 - 0.45j
    z0 = State2((z, z.conjugate()), "Z", 1.0)
    out = march(MethodId.WKB3, Grid.uniform(1.0, 2.0, 32), z0, airy_phase)
    for state in out:
        assert (
            abs(state.components[1] - state.components[0].conjugate()) <= 1e-14
        )


def test_march_frame_unitarity(airy_phase):
    # || U_n ||_2 == || Z_n ||_2 at every node to 1e-15 (rotation + mixer
    # are unitary).
    z0 = State2((0.3 + 0.2j, 1.0 - 0.1j), "Z", 1.0)
    out = march(MethodId.WKB2, Grid.uniform(1.0, 2.0, 16), z0, airy_phase)
    for state in out:
        u = Z_to_U(state, state.x, airy_phase)
        assert abs(u.norm() - state.norm()) <= 1e-15 * max(1.0, state.norm())


def test_reversal_consistency(airy_phase):
    # One step on [xi, eta] against the product of the two half-steps: the
    # defect shrinks at the local consistency order (h^4 for the third-order
    # pair, h^3 for the second-order scheme).
    hs = [0.05, 0.025, 0.0125, 0.00625]
    thresholds = {MethodId.WKB3: 3.5, MethodId.WKB3S: 3.5, MethodId.WKB2: 2.5}
    for meth, need in thresholds.items():
        diffs = []
        for h in hs:
            xi, eta = 1.0, 1.0 + h
            mid = xi + 0.5 * h
            one = step_matrix(meth, xi, eta, airy_phase)
            two = step_matrix(meth, mid, eta, airy_phase) @ step_matrix(
                meth, xi, mid, airy_phase
            )
            diffs.append((one - two).max_abs())
        assert log2_slope(hs, diffs) >= need


def test_march_validates_inputs(airy_phase):
    z0 = State2((1.0, 1.0), "Z", 1.0)
    with pytest.raises(ConfigError):
        march(MethodId.WKB3, Grid.uniform(1.0, 2.0, 4), State2((1, 1), "U", 1.0), airy_phase)
    with pytest.raises(ConfigError):
        march(MethodId.WKB3, Grid.uniform(1.2, 2.0, 4), z0, airy_phase)


def test_march_aborts_on_slope_floor_violation():
    model = builtin_model("constant", c=1.0)
    ph = exact_phase(model, 0.25, phase_floor=2.0)  # floor above phi' = 1
    z0 = State2((1.0, 1.0), "Z", 0.0)
    with pytest.raises(PhaseSlopeError):
        march(MethodId.WKB3, Grid.uniform(0.0, 1.0, 4), z0, ph)


# ===== solve_ivp =====


def test_solve_ivp_plane_wave_is_exact():
    # a == 1 gives b == 0: the scheme is exact and the full pipeline must
    # reproduce e^{ix/eps} to rotation roundoff.
    model = builtin_model("constant", c=1.0)
    eps = 2.0**-5
    ph = exact_phase(model, eps)
    grid = Grid.uniform(0.0, 1.0, 13)
    out = solve_ivp(MethodId.WKB3, grid, 1.0, 1j, ph)
    for (phi, dphi), x in zip(out, grid.nodes):
        want = cmath.exp(1j * x / eps)
        assert abs(phi - want) <= 1e-13
        assert abs(dphi - 1j * want) <= 1e-13


def test_solve_ivp_single_node_grid_returns_initial_data(airy_phase):
    out = solve_ivp(MethodId.WKB2, Grid((1.0,)), 0.3 + 0.1j, -0.2j, airy_phase)
    assert len(out) == 1
    phi, dphi = out[0]
    assert abs(phi - (0.3 + 0.1j)) <= 1e-13
    assert abs(dphi - (-0.2j)) <= 1e-13


def test_solve_ivp_methods_differ_on_nontrivial_problem(airy_phase):
    # Sanity guard against the methods collapsing to one implementation:
    # second- and third-order outputs must differ measurably on a coarse grid.
    grid = Grid.uniform(1.0, 2.0, 4)
    outs = {
        meth: solve_ivp(meth, grid, 1.0, 0.0, airy_phase)[-1][0]
        for meth in ALL_METHODS
    }
    assert abs(outs[MethodId.WKB2] - outs[MethodId.WKB3]) > 1e-10
    assert abs(outs[MethodId.WKB3S] - outs[MethodId.WKB3]) > 1e-14
