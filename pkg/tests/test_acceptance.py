"""Acceptance suite: the headline order-of-convergence and correctness
claims of the package, verified end-to-end through the public API.

Each test states a claim about scheme behavior (convergence order in h,
asymptotic correctness in epsilon, quadrature order versus brute-force
oracles, reference-solution identities, structural exactness) and verifies
it at fixed tolerances on deterministic sweeps, with wall-clock budgets
where speed is part of the claim.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from wkbmarch.coeffs import builtin_model
from wkbmarch.harness import (
    ExperimentConfig,
    fit_loglog_slope,
    run_convergence,
    run_phase_study,
)
from wkbmarch.quadrature import Mat2, m_p_oracle, q1, q2, q2_simp, q3, q3_simp
from wkbmarch.reference import (
    airy_exact_solution,
    airy_pair,
    bessel_quad,
    rk_oracle,
)
from wkbmarch.stepper import (
    Grid,
    MethodId,
    State2,
    U_to_Z,
    Z_to_U,
    march,
    step_matrix,
    wave_to_U,
)
from wkbmarch.wkb_core import exact_phase

ALL_METHODS = (MethodId.WKB3, MethodId.WKB3S, MethodId.WKB2)
EPS_SET = (0.25, 0.125, 0.0625)

# Chord fits only read the asymptotic order when every cell is below the
# oscillation knee h ~ pi*eps/2; coarser cells saturate below the power law
# and drag a least-squares fit under the true order.  For the epsilon set
# above, this window keeps all cells sub-knee.
ORDER_WINDOW = tuple(2.0**-k for k in range(3, 8))


@pytest.fixture(scope="module")
def airy_sweep():
    """Exact-phase error sweep on the linear-coefficient problem, timed."""
    config = ExperimentConfig(
        problem="airy",
        methods=ALL_METHODS,
        epsilons=EPS_SET,
        step_sizes=ORDER_WINDOW,
    )
    tick = time.perf_counter()
    table = run_convergence(config)
    elapsed = time.perf_counter() - tick
    return table, elapsed


# ===== convergence order in h (airy testbed) =====


def test_airy_third_order_wkb3_and_wkb3s(airy_sweep):
    table, elapsed = airy_sweep
    for fit in table.slopes:
        if fit.method in ("WKB3", "WKB3S"):
            assert fit.slope is not None
            assert fit.slope >= 2.8, (fit.method, fit.epsilon, fit.slope)
            assert fit.excluded_h == ()
    assert elapsed < 10.0


def test_airy_second_order_wkb2(airy_sweep):
    table, _ = airy_sweep
    for fit in table.slopes:
        if fit.method == "WKB2":
            assert fit.slope is not None
            assert 1.8 <= fit.slope <= 2.6, (fit.epsilon, fit.slope)


# ===== h^4 regime at tiny epsilon =====

TINY_EPS = 1e-3
TINY_EPS_WINDOW = (1.0, 0.5, 0.25, 0.125)


def _tiny_eps_errors():
    config = ExperimentConfig(
        problem="airy",
        methods=(MethodId.WKB3,),
        epsilons=(TINY_EPS,),
        step_sizes=TINY_EPS_WINDOW,
    )
    return [r.max_error_U for r in run_convergence(config).records]


@pytest.mark.xfail(
    strict=True,
    reason=(
        "not observable in double precision: at epsilon = 1e-3 the coarsest "
        "cell's error is already ~6.5e-14, so every point of this window "
        "sits below the 1e-13 fit floor and a floored fit has no usable "
        "points; the h^4 regime needs ~4 decades of error range above the "
        "floor, i.e. extended-precision arithmetic"
    ),
)
def test_tiny_epsilon_h4_regime_with_errors_above_fit_floor():
    errors = _tiny_eps_errors()
    slope, n_used, excluded = fit_loglog_slope(TINY_EPS_WINDOW, errors)
    assert excluded == ()  # every fitted error above the floor
    assert n_used == len(TINY_EPS_WINDOW)
    assert slope is not None and slope >= 3.5


def test_tiny_epsilon_errors_sit_below_double_floor():
    # What IS true in double precision: the scheme beats the fit floor on
    # the whole window (so the floored fit rightly refuses to produce a
    # slope), the errors still fall monotonically, and the pairwise decay
    # order rises beyond 3 before roundoff saturation.
    errors = _tiny_eps_errors()
    assert all(err < 1e-13 for err in errors)
    assert all(b < a for a, b in zip(errors, errors[1:]))
    slope, n_used, excluded = fit_loglog_slope(TINY_EPS_WINDOW, errors)
    assert slope is None
    assert n_used == 0
    assert excluded == TINY_EPS_WINDOW
    pairwise = [
        math.log2(a / b) for a, b in zip(errors, errors[1:])
    ]
    assert pairwise[0] >= 2.8
    assert max(pairwise) >= 3.3


# ===== asymptotic correctness in epsilon =====


def test_errors_decrease_with_epsilon_at_fixed_h():
    config = ExperimentConfig(
        problem="airy",
        methods=ALL_METHODS,
        epsilons=(0.25, 0.125, 0.0625, 0.03125),
        step_sizes=(0.125,),
    )
    table = run_convergence(config)
    for method in ALL_METHODS:
        series = [
            r.max_error_U for r in table.records if r.method == method.name
        ]
        assert len(series) == 4
        assert all(b < a for a, b in zip(series, series[1:])), (
            method.name,
            series,
        )


# ===== quadrature order against brute-force oracles =====


def test_quadrature_orders_vs_oracle():
    tick = time.perf_counter()
    model = builtin_model("airy")
    xi = 1.0
    # Windows inside the asymptotic regime: the three-fold iterated
    # integral's difference saturates at coarser h, so its window sits one
    # octave higher than the single/double integrals'.
    deep = (0.05, 0.025, 0.0125, 0.00625)
    wide = (0.2, 0.1, 0.05, 0.025)
    min_slope = {"q1": np.inf, "q2": np.inf, "q2s": np.inf, "q3s": np.inf, "q3": np.inf}
    for eps in (0.2, 0.1, 0.05):
        phase = exact_phase(model, eps)
        errs = {name: [] for name in min_slope}
        for h in deep:
            eta = xi + h
            oracle_1 = m_p_oracle(1, xi, eta, phase, 1e-14).a21
            oracle_2 = m_p_oracle(2, xi, eta, phase, 1e-14).a11
            oracle_3 = m_p_oracle(3, xi, eta, phase, 1e-14).a21
            errs["q1"].append(abs(q1(3, 3, xi, eta, phase) - oracle_1))
            errs["q2"].append(abs(q2(xi, eta, phase) - oracle_2))
            errs["q2s"].append(abs(q2_simp(xi, eta, phase) - oracle_2))
            errs["q3s"].append(abs(q3_simp(xi, eta, phase) - oracle_3))
        for h in wide:
            eta = xi + h
            oracle_3 = m_p_oracle(3, xi, eta, phase, 1e-14).a21
            errs["q3"].append(abs(q3(xi, eta, phase) - oracle_3))
        for name, window in (
            ("q1", deep),
            ("q2", deep),
            ("q2s", deep),
            ("q3s", deep),
            ("q3", wide),
        ):
            slope = float(
                np.polyfit(np.log10(window), np.log10(errs[name]), 1)[0]
            )
            min_slope[name] = min(min_slope[name], slope)
    assert min_slope["q1"] >= 2.7
    assert min_slope["q2"] >= 3.7
    assert min_slope["q2s"] >= 3.7
    assert min_slope["q3s"] >= 2.7
    assert min_slope["q3"] >= 3.7
    assert time.perf_counter() - tick < 60.0


# ===== near-constancy of the rotated unknown =====


def test_marched_z_stays_eps2_close_to_initial():
    model = builtin_model("airy")
    grid = Grid.uniform(1.0, 2.0, 16)
    eps_list = [2.0**-k for k in range(3, 8)]
    drifts = []
    for eps in eps_list:
        phase = exact_phase(model, eps)
        u0 = wave_to_U(1.0, 0.0, 1.0, model, eps)
        z0 = U_to_Z(u0, 1.0, phase)
        states = march(MethodId.WKB3, grid, z0, phase)
        drifts.append(
            max(
                max(
                    abs(s.components[0] - z0.components[0]),
                    abs(s.components[1] - z0.components[1]),
                )
                for s in states
            )
        )
    slope = float(np.polyfit(np.log10(eps_list), np.log10(drifts), 1)[0])
    assert slope >= 1.8


# ===== numerically computed phase =====


def test_simpson_phase_fourth_order_and_curve_inversion():
    window = (1.0, 0.5, 0.25, 0.125)
    errors_h1 = {}
    for eps in (2.0**-6, 2.0**-3):
        config = ExperimentConfig(
            problem="airy",
            methods=(MethodId.WKB3, MethodId.WKB3S),
            epsilons=(eps,),
            step_sizes=window,
            phase_mode="simpson",
        )
        table = run_phase_study(config)
        for method in ("WKB3", "WKB3S"):
            errs = [
                r.max_error_U for r in table.records if r.method == method
            ]
            errors_h1[(method, eps)] = errs[0]
            if eps == 2.0**-6:
                slope, _, _ = fit_loglog_slope(window, errs)
                assert 3.5 <= slope <= 4.5, (method, slope)
    # curve inversion at the coarsest cell: the phase error's 1/eps
    # amplification makes the smaller epsilon WORSE there
    for method in ("WKB3", "WKB3S"):
        assert (
            errors_h1[(method, 2.0**-6)] > errors_h1[(method, 2.0**-3)]
        )


def test_chebyshev_phase_matches_exact_phase_within_factor_two(airy_sweep):
    exact_table, _ = airy_sweep
    config = ExperimentConfig(
        problem="airy",
        methods=(MethodId.WKB3, MethodId.WKB3S),
        epsilons=EPS_SET,
        step_sizes=ORDER_WINDOW,
        phase_mode="chebyshev",
        n_cheb=17,
    )
    cheb_table = run_phase_study(config)
    exact_cells = {
        (r.method, r.epsilon, r.h): r.max_error_U for r in exact_table.records
    }
    assert len(cheb_table.records) == 2 * len(EPS_SET) * len(ORDER_WINDOW)
    for record in cheb_table.records:
        counterpart = exact_cells[(record.method, record.epsilon, record.h)]
        ratio = record.max_error_U / counterpart
        assert 0.5 <= ratio <= 2.0, (record.method, record.epsilon, record.h)


# ===== exponential-coefficient testbed =====


def test_exp_testbed_orders_and_wkb3_dominance():
    window = tuple(2.0**-k for k in range(1, 6))
    config = ExperimentConfig(
        problem="exp",
        methods=ALL_METHODS,
        epsilons=(0.25, 0.0625),
        step_sizes=window,
    )
    table = run_convergence(config)
    for fit in table.slopes:
        if fit.method in ("WKB3", "WKB3S"):
            assert fit.slope is not None
            assert fit.slope >= 2.8, (fit.method, fit.epsilon, fit.slope)
    for eps in (0.25, 0.0625):
        third = [
            r.max_error_U
            for r in table.records
            if r.method == "WKB3" and r.epsilon == eps
        ]
        second = [
            r.max_error_U
            for r in table.records
            if r.method == "WKB2" and r.epsilon == eps
        ]
        assert all(a <= b for a, b in zip(third, second)), eps


# ===== reference-solution identities =====


def test_airy_wronskian():
    inv_pi = 1.0 / math.pi
    ts = np.concatenate(
        [np.linspace(-8.0, 5.0, 100), -np.logspace(math.log10(8.0), 6.0, 100)]
    )
    assert len(ts) == 200
    for t in ts:
        ai, bi, dai, dbi = airy_pair(float(t))
        assert abs((ai * dbi - dai * bi) - inv_pi) <= 1e-11 * inv_pi


def test_bessel_cross_product():
    zs = np.logspace(-3.0, 6.0, 200)
    for z in zs:
        j0, j1, y0, y1 = bessel_quad(float(z))
        expected = 2.0 / (math.pi * z)
        assert abs((j1 * y0 - j0 * y1) - expected) <= 1e-10 * abs(expected)


def test_special_function_vs_brute_force_oracle():
    eps = 0.1
    model = builtin_model("airy")
    phi0, eps_dphi0 = airy_exact_solution(eps, 1.0)
    oracle = rk_oracle(model, eps, (1.0, 2.0), phi0, eps_dphi0, 500)
    for x in np.linspace(1.0, 2.0, 25):
        phi_o, dphi_o = oracle(float(x))
        phi_e, dphi_e = airy_exact_solution(eps, float(x))
        assert abs(phi_o - phi_e) <= 1e-8
        assert abs(dphi_o - dphi_e) <= 1e-8


# ===== structural exactness =====


def test_frame_roundtrip_unitarity():
    model = builtin_model("airy")
    phase = exact_phase(model, 0.25)
    samples = [
        (0.3 + 0.7j, -0.2 + 0.1j),
        (1.0 + 0.0j, 0.0 + 1.0j),
        (-0.8 - 0.6j, 0.5 - 0.4j),
    ]
    for x in (1.0, 1.37, 2.0):
        for u1, u2 in samples:
            u = State2((u1, u2), "U", x)
            z = U_to_Z(u, x, phase)
            back = Z_to_U(z, x, phase)
            assert abs(back.components[0] - u1) <= 1e-15
            assert abs(back.components[1] - u2) <= 1e-15
            # the frame change is unitary: the 2-norm survives exactly
            norm_u = abs(u1) ** 2 + abs(u2) ** 2
            norm_z = abs(z.components[0]) ** 2 + abs(z.components[1]) ** 2
            assert abs(norm_u - norm_z) <= 1e-14 * norm_u


def test_step_matrices_keep_conjugate_pattern():
    model = builtin_model("airy")
    phase = exact_phase(model, 0.25)
    for method in ALL_METHODS:
        for h in (0.5, 0.25, 0.1):
            matrix = step_matrix(method, 1.0, 1.0 + h, phase)
            assert matrix.a22 == matrix.a11.conjugate()
            assert matrix.a12 == matrix.a21.conjugate()


def test_zero_coupling_is_exact_identity():
    model = builtin_model("constant")
    phase = exact_phase(model, 0.25)
    for method in ALL_METHODS:
        matrix = step_matrix(method, 0.0, 0.5, phase)
        identity = Mat2.identity()
        assert matrix.a11 == identity.a11
        assert matrix.a12 == identity.a12
        assert matrix.a21 == identity.a21
        assert matrix.a22 == identity.a22
    grid = Grid.uniform(0.0, 1.0, 8)
    z0 = State2((0.4 - 0.2j, 0.4 + 0.2j), "Z", 0.0)
    for method in ALL_METHODS:
        for state in march(method, grid, z0, phase):
            assert state.components[0] == z0.components[0]
            assert state.components[1] == z0.components[1]
