"""WKB marching schemes for highly oscillatory second-order ODEs.

Solves ``eps^2 * w''(x) + a(x) * w(x) = 0`` with smooth a(x) >= a0 > 0 on
coarse, epsilon-independent grids, using one-step marching schemes built from
asymptotic (integration-by-parts) quadratures of the oscillatory integrals
that arise after transforming to slowly varying variables.

Layered API
-----------
- :mod:`wkbmarch.coeffs` — coefficient models ``a(x)`` with jet providers.
- :mod:`wkbmarch.wkb_core` — phase models, the well-prepared coefficient
  ``beta``, the oscillatory Taylor remainders ``h_p``.
- :mod:`wkbmarch.phase_numeric` — Simpson and Chebyshev phase tabulation.
- :mod:`wkbmarch.quadrature` — the asymptotic quadratures ``q1 … q3_simp``
  and the brute-force iterated-integral oracle.
- :mod:`wkbmarch.stepper` — frame transforms, step matrices, marching.
- :mod:`wkbmarch.reference` — self-contained special-function references
  and a brute-force time-stepping oracle.
- :mod:`wkbmarch.harness` — declarative experiment sweeps with slope fits.
- :mod:`wkbmarch.cli` — the ``wkbmarch`` command.
"""

from __future__ import annotations

from .coeffs import CoefficientModel, builtin_model, jet
from .errors import (
    ConfigError,
    DomainError,
    JetOrderError,
    OracleBudgetError,
    PhaseSlopeError,
    ReferenceBudgetError,
    WkbError,
)
from .harness import (
    ExperimentConfig,
    ResultTable,
    RunRecord,
    SlopeFit,
    fit_loglog_slope,
    run_convergence,
    run_phase_study,
    run_solve,
    run_work_precision,
)
from .phase_numeric import chebyshev_phase, simpson_phase
from .reference import (
    ReferenceSolution,
    airy_exact_solution,
    airy_pair,
    airy_reference,
    bessel_quad,
    constant_reference,
    expx_exact_solution,
    expx_reference,
    rk_oracle,
)
from .stepper import (
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
from .wkb_core import PhaseModel, beta, exact_phase, h_p

__version__ = "0.1.0"

__all__ = [
    "CoefficientModel",
    "ConfigError",
    "DomainError",
    "ExperimentConfig",
    "Grid",
    "JetOrderError",
    "MethodId",
    "OracleBudgetError",
    "PhaseModel",
    "PhaseSlopeError",
    "ReferenceBudgetError",
    "ReferenceSolution",
    "ResultTable",
    "RunRecord",
    "SlopeFit",
    "State2",
    "U_to_Z",
    "U_to_wave",
    "WkbError",
    "Z_to_U",
    "airy_exact_solution",
    "airy_pair",
    "airy_reference",
    "bessel_quad",
    "beta",
    "builtin_model",
    "chebyshev_phase",
    "constant_reference",
    "exact_phase",
    "expx_exact_solution",
    "expx_reference",
    "fit_loglog_slope",
    "h_p",
    "jet",
    "march",
    "rk_oracle",
    "run_convergence",
    "run_phase_study",
    "run_solve",
    "run_work_precision",
    "simpson_phase",
    "solve_ivp",
    "step_matrix",
    "wave_to_U",
    "__version__",
]
