"""Command-line interface for the marching schemes and the experiment harness.

Subcommands
-----------
``solve``
    Integrate one (method, epsilon, h) cell and emit the per-node solution.
``convergence``
    Error-vs-step-size sweep with per-series slope fits.
``work-precision``
    The same sweep with repeated timing samples per cell (median kept).
``phase-study``
    Convergence sweep under a numerically computed phase (``simpson`` or
    ``chebyshev``); records additionally carry the phase error.

Configuration
-------------
Experiments are described by key/value data, either in a config file
(``--config FILE``, TOML or JSON by extension) or by flags; flags override
file values. Recognized keys (all optional unless noted):

================== =====================================================
key                 meaning
================== =====================================================
problem             ``airy`` | ``exp`` | ``constant``  (required)
methods             list or comma/space string of ``wkb2 wkb3 wkb3s``
epsilons            list or string of floats in (0, 1)  (required)
step_sizes          list or string of positive floats  (required)
phase_mode          ``exact`` | ``simpson`` | ``chebyshev``
n_cheb              Chebyshev node count (>= 3, default 17)
error_frame         ``U`` | ``wave`` (which error drives slope fits)
repetitions         timing samples per cell (work-precision runs)
output              destination path (omit to print to stdout)
output_format       ``csv`` | ``json``
x_end               right endpoint for the ``airy`` problem
workers             process-pool width (1 = inline)
steps_per_wavelength  brute-force reference resolution
================== =====================================================

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical
failures (phase-slope positivity, reference/oracle budget, domain).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - version-dependent import
    import tomli as tomllib

from .errors import ConfigError, WkbError
from .harness import (
    ExperimentConfig,
    run_convergence,
    run_phase_study,
    run_solve,
    run_work_precision,
)

_SOLVE_COLUMNS = (
    "x",
    "phi_re",
    "phi_im",
    "eps_dphi_re",
    "eps_dphi_im",
    "error_U",
)


# ===== argument parsing =====


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wkbmarch",
        description=(
            "Marching schemes for highly oscillatory second-order ODEs "
            "on coarse grids."
        ),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "integrate one cell and emit the per-node solution"),
        ("convergence", "error-vs-step-size sweep with slope fits"),
        ("work-precision", "sweep with repeated timing samples per cell"),
        ("phase-study", "sweep under a numerically computed phase"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        _add_common_options(sub)
    return parser


def _add_common_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="TOML or JSON config file")
    sub.add_argument("--problem", help="airy | exp | constant")
    sub.add_argument(
        "--methods", help="comma/space separated: wkb2 wkb3 wkb3s"
    )
    sub.add_argument("--epsilons", help="comma/space separated floats")
    sub.add_argument("--step-sizes", help="comma/space separated floats")
    sub.add_argument("--phase-mode", help="exact | simpson | chebyshev")
    sub.add_argument("--n-cheb", type=int, help="Chebyshev node count")
    sub.add_argument("--error-frame", help="U | wave")
    sub.add_argument("--repetitions", type=int, help="timing samples per cell")
    sub.add_argument("--output", help="write results here instead of stdout")
    sub.add_argument(
        "--format",
        dest="output_format",
        choices=("csv", "json"),
        help="output format",
    )
    sub.add_argument("--x-end", type=float, help="airy right endpoint")
    sub.add_argument("--workers", type=int, help="process-pool width")
    sub.add_argument(
        "--steps-per-wavelength",
        type=int,
        help="brute-force reference resolution",
    )


_FLAG_KEYS = (
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
)


def load_config_file(path: str) -> dict:
    """Read a TOML (default) or JSON config file into a plain dict."""
    try:
        with open(path, "rb") as handle:
            blob = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    try:
        if path.endswith(".json"):
            data = json.loads(blob.decode("utf-8"))
        else:
            data = tomllib.loads(blob.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path!r} must hold key/value data")
    return data


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge config file and flag overrides into an ExperimentConfig."""
    data = load_config_file(args.config) if args.config else {}
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return ExperimentConfig.from_dict(data)


# ===== output =====


def _solve_csv(rows: Sequence[dict]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_SOLVE_COLUMNS)
    for row in rows:
        writer.writerow([repr(row[key]) for key in _SOLVE_COLUMNS])
    return out.getvalue()


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)


def _execute(command: str, config: ExperimentConfig) -> str:
    if command == "solve":
        rows = run_solve(config)
        if config.output_format == "json":
            return json.dumps(rows, indent=2)
        return _solve_csv(rows)
    runner = {
        "convergence": run_convergence,
        "work-precision": run_work_precision,
        "phase-study": run_phase_study,
    }[command]
    table = runner(config)
    return table.to_json() if config.output_format == "json" else table.to_csv()


# ===== entry point =====


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        text = _execute(args.command, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except WkbError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    _emit(text, config.output)
    return 0


if __name__ == "__main__":  # pragma: no cover - module execution hook
    sys.exit(main())
