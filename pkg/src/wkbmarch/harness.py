"""Batch experiment driver: convergence sweeps, work-precision and phase studies.

Each experiment is a grid of independent cells — one per (method, epsilon,
step size) — solved against the problem's ground-truth reference.  The
driver reports the maximum nodal error in two frames (the scaled U frame,
the primary metric, and the raw wave function), the median wall time of the
marching loop alone (reference evaluation and phase precomputation are kept
outside the clock), and a least-squares log-log slope per (method, epsilon)
series.  Cells can run in a process pool; records are merged back in
deterministic sweep order, so error columns are bit-identical across reruns
whatever the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coeffs import CoefficientModel, builtin_model, jet
from .errors import ConfigError
from .phase_numeric import chebyshev_phase, simpson_phase
from .reference import (
    ReferenceSolution,
    airy_exact_solution,
    airy_reference,
    constant_reference,
    expx_reference,
    rk_oracle,
)
from .stepper import Grid, MethodId, U_to_Z, U_to_wave, Z_to_U, march, wave_to_U
from .wkb_core import PhaseModel, exact_phase

__all__ = [
    "RoundoffFloorWarning",
    "ExperimentConfig",
    "RunRecord",
    "SlopeFit",
    "ResultTable",
    "run_convergence",
    "run_work_precision",
    "run_phase_study",
    "run_solve",
]

#: Errors at or below this level sit in the double-precision roundoff floor;
#: slope fits use only points strictly above it and flag the rest.
FIT_FLOOR = 1e-13

#: Fixed CSV column order.
CSV_COLUMNS = (
    "method",
    "epsilon",
    "h",
    "phase_mode",
    "n_steps",
    "max_error_U",
    "max_error_wave",
    "wall_time_s",
    "slope_fit",
)

_PROBLEMS = ("airy", "exp", "constant", "custom")
_PHASE_MODES = ("exact", "simpson", "chebyshev")
_ERROR_FRAMES = ("U", "wave")
_FORMATS = ("csv", "json")


class RoundoffFloorWarning(UserWarning):
    """A requested (epsilon, h) cell predicts errors below the double floor."""


# ===== configuration =====


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment sweep.

    Attributes
    ----------
    problem : str
        ``"airy"`` (linear coefficient on [1, x_end]), ``"exp"``
        (exponential coefficient on [0, 1]), ``"constant"``, or
        ``"custom"`` (bring your own model + initial data, brute-force
        reference).
    methods : tuple of MethodId
    epsilons, step_sizes : tuple of float
        All epsilons in (0, 1); all step sizes positive and no larger than
        the problem interval.
    phase_mode : str
        ``"exact"``, ``"simpson"``, or ``"chebyshev"`` (with ``n_cheb``).
    error_frame : str
        Which error column drives the slope fits: ``"U"`` or ``"wave"``.
    repetitions : int
        Wall-time samples per cell (work-precision runs take the median).
    output, output_format : str or None, str
        Optional destination path and its format.
    x_end : float or None
        Right endpoint for the airy problem (default 2).
    workers : int
        Process-pool width; 1 runs inline.
    custom_model, custom_initial, steps_per_wavelength
        Custom-problem ingredients; the reference is the brute-force
        integrator at the given resolution.
    """

    problem: str
    methods: Tuple[MethodId, ...]
    epsilons: Tuple[float, ...]
    step_sizes: Tuple[float, ...]
    phase_mode: str = "exact"
    n_cheb: int = 17
    error_frame: str = "U"
    repetitions: int = 1
    output: Optional[str] = None
    output_format: str = "csv"
    x_end: Optional[float] = None
    workers: int = 1
    custom_model: Optional[CoefficientModel] = None
    custom_initial: Optional[Tuple[complex, complex]] = None
    steps_per_wavelength: int = 500

    def __post_init__(self) -> None:
        if self.problem not in _PROBLEMS:
            raise ConfigError(
                f"unknown problem {self.problem!r}; expected one of {_PROBLEMS}"
            )
        if not self.methods:
            raise ConfigError("need at least one method")
        for m in self.methods:
            if not isinstance(m, MethodId):
                raise ConfigError(f"methods must be MethodId values, got {m!r}")
        if not self.epsilons:
            raise ConfigError("need at least one epsilon")
        for eps in self.epsilons:
            if not 0.0 < eps < 1.0:
                raise ConfigError(f"epsilon must lie in (0, 1), got {eps!r}")
        if not self.step_sizes:
            raise ConfigError("need at least one step size")
        if self.phase_mode not in _PHASE_MODES:
            raise ConfigError(
                f"unknown phase mode {self.phase_mode!r}; "
                f"expected one of {_PHASE_MODES}"
            )
        if self.n_cheb < 3:
            raise ConfigError(f"n_cheb must be >= 3, got {self.n_cheb}")
        if self.error_frame not in _ERROR_FRAMES:
            raise ConfigError(
                f"unknown error frame {self.error_frame!r}; "
                f"expected one of {_ERROR_FRAMES}"
            )
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.output_format not in _FORMATS:
            raise ConfigError(
                f"unknown output format {self.output_format!r}; "
                f"expected one of {_FORMATS}"
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        problem = build_problem(self)
        length = problem.interval[1] - problem.interval[0]
        for h in self.step_sizes:
            if not 0.0 < h <= length * (1.0 + 1e-12):
                raise ConfigError(
                    f"step size {h!r} outside (0, {length}] for problem "
                    f"{self.problem!r}"
                )
        floored = [
            (eps, h)
            for eps in self.epsilons
            for h in self.step_sizes
            if eps**3 * h**3 * max(eps, h) < 1e-13
        ]
        if floored:
            warnings.warn(
                f"{len(floored)} (epsilon, h) cell(s) predict errors below the "
                f"double-precision floor (first: {floored[0]}); their error "
                "values will saturate near 1e-14 and are excluded from slope "
                "fits",
                RoundoffFloorWarning,
                stacklevel=2,
            )

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        """Build a config from plain key/value data (config file or CLI)."""
        data = dict(raw)
        unknown = set(data) - {
            "problem",
            "methods",
            "epsilons",
            "step_sizes",
            "phase_mode",
            "n_cheb",
            "error_frame",
            "repetitions",
            "output",
            "output_format",
            "x_end",
            "workers",
            "steps_per_wavelength",
        }
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "problem" not in data:
            raise ConfigError("config needs a 'problem'")
        methods = data.get("methods", ("WKB3",))
        if isinstance(methods, str):
            methods = [m for m in methods.replace(",", " ").split() if m]
        data["methods"] = tuple(
            m if isinstance(m, MethodId) else MethodId.parse(str(m))
            for m in methods
        )
        for key in ("epsilons", "step_sizes"):
            if key not in data:
                raise ConfigError(f"config needs '{key}'")
            values = data[key]
            if isinstance(values, str):
                values = [v for v in values.replace(",", " ").split() if v]
            try:
                data[key] = tuple(float(v) for v in values)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad {key}: {values!r}") from exc
        for key, caster in (
            ("n_cheb", int),
            ("repetitions", int),
            ("workers", int),
            ("steps_per_wavelength", int),
            ("x_end", float),
        ):
            if key in data and data[key] is not None:
                try:
                    data[key] = caster(data[key])
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"bad {key}: {data[key]!r}") from exc
        return cls(**data)


# ===== problems =====


@dataclass(frozen=True)
class _Problem:
    name: str
    model: CoefficientModel
    interval: Tuple[float, float]
    initial: Callable[[float], Tuple[complex, complex]] = field(repr=False)
    reference: Callable[[float], ReferenceSolution] = field(repr=False)


def build_problem(config: ExperimentConfig) -> _Problem:
    """Model, interval, initial data, and reference factory for a config."""
    if config.problem == "airy":
        model = (
            builtin_model("airy")
            if config.x_end is None
            else builtin_model("airy", x_end=config.x_end)
        )
        return _Problem(
            "airy",
            model,
            model.domain,
            lambda eps: airy_exact_solution(eps, model.domain[0]),
            airy_reference,
        )
    if config.problem == "exp":
        model = builtin_model("exp")
        return _Problem(
            "exp",
            model,
            model.domain,
            lambda eps: (1.0 + 0.0j, 0.0 + 0.0j),
            expx_reference,
        )
    if config.problem == "constant":
        model = builtin_model("constant")
        c = jet(model, model.domain[0], 0).value
        initial = (1.0 + 0.0j, 1.0j * math.sqrt(c))

        def const_reference(eps: float) -> ReferenceSolution:
            return constant_reference(model, eps, *initial)

        return _Problem(
            "constant", model, model.domain, lambda eps: initial, const_reference
        )
    if config.custom_model is None or config.custom_initial is None:
        raise ConfigError(
            "custom problem needs custom_model and custom_initial"
        )
    model = config.custom_model
    initial = (
        complex(config.custom_initial[0]),
        complex(config.custom_initial[1]),
    )
    spw = config.steps_per_wavelength

    def custom_reference(eps: float) -> ReferenceSolution:
        return rk_oracle(model, eps, model.domain, *initial, spw)

    return _Problem(
        "custom", model, model.domain, lambda eps: initial, custom_reference
    )


# ===== records and tables =====


@dataclass(frozen=True)
class RunRecord:
    """One experiment cell: a single (method, epsilon, h) solve."""

    method: str
    epsilon: float
    h: float
    phase_mode: str
    n_steps: int
    max_error_U: float
    max_error_wave: float
    wall_time_s: float
    phase_max_error: Optional[float] = None
    phase_precompute_s: Optional[float] = None

    def __post_init__(self) -> None:
        if self.max_error_U < 0.0 or self.max_error_wave < 0.0:
            raise ConfigError("errors cannot be negative")
        if not self.wall_time_s > 0.0:
            raise ConfigError("wall time must be positive")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares log-log fit over one (method, epsilon) series."""

    method: str
    epsilon: float
    slope: Optional[float]
    n_used: int
    excluded_h: Tuple[float, ...]


@dataclass(frozen=True)
class ResultTable:
    """Records plus per-series slope fits, serializable as CSV or JSON."""

    records: Tuple[RunRecord, ...]
    slopes: Tuple[SlopeFit, ...]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            writer.writerow(
                [
                    r.method,
                    repr(r.epsilon),
                    repr(r.h),
                    r.phase_mode,
                    r.n_steps,
                    repr(r.max_error_U),
                    repr(r.max_error_wave),
                    repr(r.wall_time_s),
                    "",
                ]
            )
        for s in self.slopes:
            writer.writerow(
                [
                    s.method,
                    repr(s.epsilon),
                    "",
                    "summary",
                    "",
                    "",
                    "",
                    "",
                    "" if s.slope is None else repr(s.slope),
                ]
            )
        return out.getvalue()

    def to_json(self) -> str:
        payload = {
            "records": [asdict(r) for r in self.records],
            "slopes": [asdict(s) for s in self.slopes],
        }
        return json.dumps(payload, indent=2)

    def write(self, path: str, output_format: str) -> None:
        text = self.to_csv() if output_format == "csv" else self.to_json()
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def fit_loglog_slope(
    hs: Sequence[float], errors: Sequence[float], floor: float = FIT_FLOOR
) -> Tuple[Optional[float], int, Tuple[float, ...]]:
    """Least-squares slope of log10(error) vs log10(h) above the floor.

    Returns ``(slope, n_used, excluded_h)``; slope is None with fewer than
    two usable points.
    """
    used_h: List[float] = []
    used_e: List[float] = []
    excluded: List[float] = []
    for h, err in zip(hs, errors):
        if err > floor:
            used_h.append(h)
            used_e.append(err)
        else:
            excluded.append(h)
    if len(used_h) < 2:
        return None, len(used_h), tuple(excluded)
    slope = float(
        np.polyfit(np.log10(np.asarray(used_h)), np.log10(np.asarray(used_e)), 1)[0]
    )
    return slope, len(used_h), tuple(excluded)


# ===== cell execution =====


def _build_phase(
    problem: _Problem,
    grid: Grid,
    epsilon: float,
    phase_mode: str,
    n_cheb: int,
) -> Tuple[PhaseModel, Optional[float]]:
    """Phase model for one cell plus max |phase~ - phase| when measurable."""
    if phase_mode == "exact":
        return exact_phase(problem.model, epsilon), None
    if phase_mode == "simpson":
        numeric = simpson_phase(problem.model, grid, epsilon)
    else:
        numeric = chebyshev_phase(problem.model, problem.interval, epsilon, n_cheb)
    phase_error = (
        numeric.max_error_vs_exact()
        if problem.model.exact_phase_capable
        else None
    )
    return numeric.to_phase_model(), phase_error


def _execute_cell(
    problem: _Problem,
    method: MethodId,
    epsilon: float,
    h: float,
    phase_mode: str,
    n_cheb: int,
    repetitions: int,
) -> RunRecord:
    x_lo, x_hi = problem.interval
    n_steps = max(1, round((x_hi - x_lo) / h))
    grid = Grid.uniform(x_lo, x_hi, n_steps)

    tick = time.perf_counter()
    phase, phase_error = _build_phase(problem, grid, epsilon, phase_mode, n_cheb)
    phase_seconds = time.perf_counter() - tick

    phi0, eps_dphi0 = problem.initial(epsilon)
    model = problem.model
    durations = []
    u_states = []
    for _ in range(repetitions):
        tick = time.perf_counter()
        u0 = wave_to_U(phi0, eps_dphi0, x_lo, model, epsilon)
        z0 = U_to_Z(u0, x_lo, phase)
        states = march(method, grid, z0, phase)
        u_states = [Z_to_U(state, state.x, phase) for state in states]
        durations.append(time.perf_counter() - tick)

    reference = problem.reference(epsilon)
    err_u = 0.0
    err_wave = 0.0
    for u in u_states:
        ref_phi, ref_dphi = reference(u.x)
        u_ref = wave_to_U(ref_phi, ref_dphi, u.x, model, epsilon)
        err_u = max(
            err_u,
            max(
                abs(a - b)
                for a, b in zip(u.components, u_ref.components)
            ),
        )
        wave_phi, _ = U_to_wave(u, model, epsilon)
        err_wave = max(err_wave, abs(wave_phi - ref_phi))

    return RunRecord(
        method=method.name,
        epsilon=float(epsilon),
        h=grid.h_max,
        phase_mode=phase_mode,
        n_steps=grid.n_steps,
        max_error_U=err_u,
        max_error_wave=err_wave,
        wall_time_s=max(statistics.median(durations), 1e-9),
        phase_max_error=phase_error,
        phase_precompute_s=phase_seconds,
    )


def _cell_worker(payload: dict) -> RunRecord:
    """Process-pool entry point: rebuild the problem from primitives."""
    config = ExperimentConfig(
        problem=payload["problem"],
        methods=(MethodId.parse(payload["method"]),),
        epsilons=(payload["epsilon"],),
        step_sizes=(payload["h"],),
        phase_mode=payload["phase_mode"],
        n_cheb=payload["n_cheb"],
        x_end=payload["x_end"],
    )
    problem = build_problem(config)
    return _execute_cell(
        problem,
        config.methods[0],
        payload["epsilon"],
        payload["h"],
        payload["phase_mode"],
        payload["n_cheb"],
        payload["repetitions"],
    )


def _run(config: ExperimentConfig, repetitions: int) -> ResultTable:
    problem = build_problem(config)
    cells = [
        (method, eps, h)
        for method in config.methods
        for eps in config.epsilons
        for h in config.step_sizes
    ]
    parallel = config.workers > 1 and config.problem != "custom"
    if parallel:
        payloads = [
            {
                "problem": config.problem,
                "method": method.name,
                "epsilon": eps,
                "h": h,
                "phase_mode": config.phase_mode,
                "n_cheb": config.n_cheb,
                "repetitions": repetitions,
                "x_end": config.x_end,
            }
            for method, eps, h in cells
        ]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_cell_worker, payloads))
    else:
        records = [
            _execute_cell(
                problem,
                method,
                eps,
                h,
                config.phase_mode,
                config.n_cheb,
                repetitions,
            )
            for method, eps, h in cells
        ]

    slopes = []
    for method in config.methods:
        for eps in config.epsilons:
            series = [
                r
                for r in records
                if r.method == method.name and r.epsilon == eps
            ]
            errors = [
                r.max_error_U if config.error_frame == "U" else r.max_error_wave
                for r in series
            ]
            slope, n_used, excluded = fit_loglog_slope(
                [r.h for r in series], errors
            )
            slopes.append(SlopeFit(method.name, eps, slope, n_used, excluded))
    return ResultTable(records=tuple(records), slopes=tuple(slopes))


# ===== public drivers =====


def run_convergence(config: ExperimentConfig) -> ResultTable:
    """Error-vs-step-size sweep; single timing sample per cell."""
    return _run(config, repetitions=1)


def run_work_precision(config: ExperimentConfig) -> ResultTable:
    """As :func:`run_convergence` with ``config.repetitions`` timing samples
    per cell (the record keeps the median); errors are identical."""
    return _run(config, repetitions=config.repetitions)


def run_phase_study(config: ExperimentConfig) -> ResultTable:
    """Convergence sweep under a numerically computed phase.

    Each record additionally carries max |phase~ - phase| over the
    tabulation grid whenever the model has a closed-form phase.
    """
    if config.phase_mode == "exact":
        raise ConfigError(
            "phase study needs phase_mode 'simpson' or 'chebyshev'"
        )
    return _run(config, repetitions=1)


def run_solve(config: ExperimentConfig) -> List[dict]:
    """Single-cell solve: the per-node solution (and error, when a
    reference exists) for exactly one (method, epsilon, h) combination."""
    if (
        len(config.methods) != 1
        or len(config.epsilons) != 1
        or len(config.step_sizes) != 1
    ):
        raise ConfigError(
            "solve needs exactly one method, one epsilon, and one step size"
        )
    problem = build_problem(config)
    method = config.methods[0]
    epsilon = config.epsilons[0]
    x_lo, x_hi = problem.interval
    n_steps = max(1, round((x_hi - x_lo) / config.step_sizes[0]))
    grid = Grid.uniform(x_lo, x_hi, n_steps)
    phase, _ = _build_phase(
        problem, grid, epsilon, config.phase_mode, config.n_cheb
    )
    phi0, eps_dphi0 = problem.initial(epsilon)
    model = problem.model
    u0 = wave_to_U(phi0, eps_dphi0, x_lo, model, epsilon)
    z0 = U_to_Z(u0, x_lo, phase)
    states = march(method, grid, z0, phase)
    reference = problem.reference(epsilon)
    rows = []
    for state in states:
        u = Z_to_U(state, state.x, phase)
        phi, eps_dphi = U_to_wave(u, model, epsilon)
        ref_phi, ref_dphi = reference(u.x)
        u_ref = wave_to_U(ref_phi, ref_dphi, u.x, model, epsilon)
        err = max(abs(a - b) for a, b in zip(u.components, u_ref.components))
        rows.append(
            {
                "x": u.x,
                "phi_re": phi.real,
                "phi_im": phi.imag,
                "eps_dphi_re": eps_dphi.real,
                "eps_dphi_im": eps_dphi.imag,
                "error_U": err,
            }
        )
    return rows
