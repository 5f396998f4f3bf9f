"""Command-line front end.

Every subcommand reads one configuration (flags, optionally layered over a
JSON file with the same field names) and writes a single report.  Reports
carry the tool version, the window constant, grid, level and the input pair,
and never the worker count, so they are byte-identical across thread settings.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .cmv import build_cmv, fibonacci_coefficients, paraorthogonal_zeros, unitarity_defect, zeros_to_csv
from .dimension import local_dimension
from .errors import InputError, NumericalFailure, NumericalRangeError, ResourceError
from .opuc import VerblunskyPair, gamma_curve, invariant_extremes, invariant_on_circle
from .spectrum import DEFAULT_GRID, b_infinity_approx, band_set, default_workers, window_constant
from .tracemap import orbit_classify
from .transfer import growth_checkpoints, growth_exponent_bound, linear_fit
from .words import fib_number

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

SUBCOMMANDS = ("spectrum", "dimension", "orbit", "growth", "invariant", "cmv-check")
FIELDS = ("alpha", "beta", "level", "grid", "theta", "window", "n_max", "lam", "out", "format", "threads")


def parse_complex(text) -> complex:
    """``"re,im"`` (or a bare real, or a two-element list from a config file) to complex."""
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise InputError(f"expected [re, im], got {text!r}")
        return complex(float(text[0]), float(text[1]))
    if isinstance(text, (int, float)):
        return complex(text)
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InputError(f"cannot read {text!r} as re,im")


@dataclass
class RunConfig:
    alpha: complex
    beta: complex
    level: int = 8
    grid: int = DEFAULT_GRID
    theta: Optional[float] = None
    window: Optional[float] = None
    n_max: Optional[int] = None
    lam: complex = 1.0
    out: Optional[str] = None
    format: str = "json"
    threads: Optional[int] = None

    def __post_init__(self):
        self.pair = VerblunskyPair(self.alpha, self.beta)  # validates the disc and alpha != beta
        if self.level < 1:
            raise InputError("level must be >= 1")
        if self.grid < 2**12:
            raise InputError("grid must be >= 4096")
        if self.format not in ("csv", "json"):
            raise InputError("format must be csv or json")
        if abs(abs(self.lam) - 1.0) > 1e-9:
            raise InputError("lambda must be unimodular")
        if self.threads is not None and self.threads < 1:
            raise InputError("threads must be >= 1")

    @property
    def workers(self) -> int:
        return self.threads if self.threads is not None else default_workers()

    def metadata(self) -> dict:
        return {
            "tool": "fibcmv",
            "version": __version__,
            "alpha": [self.pair.alpha.real, self.pair.alpha.imag],
            "beta": [self.pair.beta.real, self.pair.beta.imag],
            "C_used": window_constant(self.pair),
            "grid": self.grid,
            "level": self.level,
        }


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError("the config file must hold a JSON object")
        if "lambda" in loaded:
            loaded["lam"] = loaded.pop("lambda")
        unknown = set(loaded) - set(FIELDS)
        if unknown:
            raise InputError(f"unknown config fields: {sorted(unknown)}")
        values.update(loaded)
    for name in FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if values.get("format") is None and values.get("out"):
        suffix = Path(values["out"]).suffix.lower().lstrip(".")
        if suffix in ("csv", "json"):
            values["format"] = suffix
    if "alpha" not in values or "beta" not in values:
        raise InputError("--alpha and --beta are required (flag or config)")
    for key in ("alpha", "beta", "lam"):
        if key in values:
            values[key] = parse_complex(values[key])
    try:
        for key in ("level", "grid", "n_max", "threads"):
            if values.get(key) is not None:
                values[key] = int(values[key])
        for key in ("theta", "window"):
            if values.get(key) is not None:
                values[key] = float(values[key])
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    return RunConfig(**values)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv_header(meta: dict) -> dict:
    return {k: json.dumps(v) for k, v in meta.items()}


def _comment_lines(meta: dict) -> list:
    return [f"# {k}: {v}" for k, v in _csv_header(meta).items()]


def run_spectrum(cfg: RunConfig) -> str:
    approx = b_infinity_approx(cfg.pair, cfg.level, grid=cfg.grid, workers=cfg.workers)
    meta = cfg.metadata() | {"n_arcs": len(approx), "measure": approx.measure()}
    if cfg.format == "csv":
        return approx.to_csv(_csv_header(meta))
    return _json(meta | {"arcs": [[lo, hi] for lo, hi in approx.arcs]})


def run_dimension(cfg: RunConfig) -> str:
    theta = math.pi if cfg.theta is None else cfg.theta
    eps = 0.3 if cfg.window is None else cfg.window
    est = local_dimension(cfg.pair, theta, eps, cfg.level, grid=cfg.grid, workers=cfg.workers)
    report = cfg.metadata() | est.to_dict()
    if cfg.format == "csv":
        flat = dict(report)
        b = flat.pop("bracket")
        flat["bracket_lower"] = None if b is None else b["lower"]
        flat["bracket_upper"] = None if b is None else b["upper"]
        keys = list(flat)
        return ",".join(keys) + "\n" + ",".join(json.dumps(flat[k]) for k in keys) + "\n"
    return _json(report)


def run_orbit(cfg: RunConfig) -> str:
    if cfg.theta is None:
        raise InputError("orbit needs --theta")
    C = window_constant(cfg.pair)
    horizon = 60 if cfg.n_max is None else cfg.n_max
    verdict = orbit_classify(gamma_curve(cfg.pair, cfg.theta), horizon, C)
    report = cfg.metadata() | {"theta": cfg.theta, "horizon": horizon} | verdict.to_dict()
    if cfg.format == "csv":
        keys = ["theta", "horizon", "kind", "steps_used", "certificate"]
        return ",".join(keys) + "\n" + ",".join(json.dumps(report[k]) for k in keys) + "\n"
    return _json(report)


def growth_report(cfg: RunConfig):
    """``(csv_text, summary)`` for the growth subcommand."""
    theta = math.pi if cfg.theta is None else cfg.theta
    n_max = 10**4 if cfg.n_max is None else cfg.n_max
    ns, logs = growth_checkpoints(cfg.pair, theta, n_max)
    if ns.size < 2:
        raise InputError("growth needs n_max >= 2")
    fit = linear_fit(np.log(ns), logs)
    inv = float(invariant_on_circle(cfg.pair, theta))
    r, gamma = growth_exponent_bound(max(inv, 0.0))
    summary = cfg.metadata() | {
        "theta": theta,
        "n_max": n_max,
        "invariant": inv,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "bound_r": r,
        "bound_gamma": gamma,
        "within_bound": bool(fit.slope <= gamma),
    }
    rows = ["n,log_norm"] + [f"{int(n)},{float(v)!r}" for n, v in zip(ns, logs)]
    return "\n".join(rows) + "\n", summary


def run_invariant(cfg: RunConfig) -> str:
    thetas = np.linspace(0.0, 2.0 * math.pi, cfg.grid, endpoint=False)
    vals = invariant_on_circle(cfg.pair, thetas)
    i0, ipi = invariant_extremes(cfg.pair)
    meta = cfg.metadata() | {"I_at_theta_0": i0, "I_at_theta_pi": ipi, "min": min(i0, ipi), "max": max(i0, ipi)}
    if cfg.format == "csv":
        lines = _comment_lines(meta) + ["theta,invariant"]
        lines += [f"{float(t)!r},{float(v)!r}" for t, v in zip(thetas, vals)]
        return "\n".join(lines) + "\n"
    return _json(meta | {"theta": thetas.tolist(), "invariant": vals.tolist()})


def run_cmv_check(cfg: RunConfig) -> str:
    if cfg.level > 12:
        raise InputError("cmv-check takes level <= 12 (zero degree f_level <= 233)")
    size = 200 if cfg.n_max is None else cfg.n_max
    m = build_cmv(fibonacci_coefficients(cfg.pair, size), size, source="fixed-point prefix")
    defect = unitarity_defect(m)
    n = fib_number(cfg.level)
    zeros = paraorthogonal_zeros(cfg.pair, n, lam=cfg.lam)
    bands = band_set(cfg.pair, cfg.level, grid=cfg.grid, workers=cfg.workers).union(
        band_set(cfg.pair, cfg.level + 1, grid=cfg.grid, workers=cfg.workers)
    )
    inside = bands.contains(zeros)
    meta = cfg.metadata() | {
        "matrix": m.to_dict(),
        "unitarity_defect": defect,
        "zero_degree": n,
        "lambda": [cfg.lam.real, cfg.lam.imag],
        "zero_count": int(zeros.size),
        "in_band_fraction": float(inside.mean()),
    }
    if cfg.format == "csv":
        return "\n".join(_comment_lines(meta)) + "\n" + zeros_to_csv(zeros, bands)
    return _json(meta | {"zeros": zeros.tolist(), "in_band": [bool(v) for v in inside]})


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def run_subcommand(name: str, cfg: RunConfig) -> int:
    """Run one subcommand and write its report; returns the exit code."""
    if name == "growth":
        rows, summary = growth_report(cfg)
        if cfg.format == "json":
            _emit(_json(summary | {"rows": [line.split(",") for line in rows.splitlines()[1:]]}), cfg.out)
        else:
            _emit(rows, cfg.out)
            summary_text = _json(summary)
            if cfg.out is None:
                sys.stderr.write(summary_text)
            else:
                Path(cfg.out).with_suffix(".summary.json").write_text(summary_text)
        return EXIT_OK
    runner = {
        "spectrum": run_spectrum,
        "dimension": run_dimension,
        "orbit": run_orbit,
        "invariant": run_invariant,
        "cmv-check": run_cmv_check,
    }[name]
    _emit(runner(cfg), cfg.out)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", help="first coefficient as re,im")
    common.add_argument("--beta", help="second coefficient as re,im")
    common.add_argument("--level", type=int, help="band level n (default 8)")
    common.add_argument("--grid", type=int, help=f"theta grid size, >= 4096 (default {DEFAULT_GRID})")
    common.add_argument("--theta", type=float, help="spectral angle in radians")
    common.add_argument("--window", type=float, help="half-width of the dimension window (default 0.3)")
    common.add_argument("--n-max", dest="n_max", type=int, help="horizon, largest n, or matrix size")
    common.add_argument("--lambda", dest="lam", help="unimodular rotation as re,im (default 1)")
    common.add_argument("--out", help="report path (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), help="report format (default: from the --out suffix, else json)")
    common.add_argument("--threads", type=int, help="worker threads (default: FIBCMV_THREADS, then all cores)")
    common.add_argument("--config", help="JSON file with the same field names; flags win")

    parser = argparse.ArgumentParser(prog="fibcmv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fibcmv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "arcs of the band approximation at --level",
        "dimension": "local box-counting dimension around --theta",
        "orbit": "escape classification of the curve point at --theta",
        "growth": "transfer-matrix norms over Fibonacci n <= --n-max",
        "invariant": "the invariant I(theta) on --grid angles",
        "cmv-check": "CMV unitarity and para-orthogonal zeros",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return run_subcommand(args.command, cfg)
    except (InputError, ResourceError) as exc:
        print(f"fibcmv: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, NumericalRangeError, FloatingPointError) as exc:
        print(f"fibcmv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BrokenPipeError:  # e.g. piped into head
        sys.stderr.close()
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
