"""Command-line front end: config ingestion, subcommand dispatch, report files.

Subcommands
-----------
verify          re-derive the displayed algebraic identities and print one
                PASS/FAIL line each
error           single evaluation of the comparison error
sweep           error across squeezing strengths (CSV/JSON report)
rate            sweep plus fitted log-log convergence slope
theta-scan      error across the squeezing phase
tk-check        generator norm at the identity next to the semigroup
                deviation supremum
oracle-compare  semigroup value against the discrete collision oracle with a
                step-halving consistency ratio

Exit codes: 0 success, 1 invariant or tolerance failure (a machine-readable
failure list is printed as JSON), 2 configuration errors.  Reports use a
fixed CSV column order; identical configuration and seed give byte-identical
files.  Complex values in config files are written as [re, im] pairs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .collision import collision_error
from .experiments import (
    ConvergenceReport,
    sweep_n,
    estimate_rate,
    theta_scan,
    tk_check,
)
from .ito_algebra import identity_suite
from .model import DegeneratePhaseError, ModelSpec, make_squeeze_params, resolve_vector
from .semigroup import StepFunction, error_norm_squared, resolve_step_function

OUTPUT_DIR_ENV = "SQUEEZELIM_OUTDIR"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config handling

CONFIG_SCHEMA = {
    "seed": None,
    "time": None,
    "dt": None,
    "grid": None,
    "samples": None,
    "tol": None,
    "expm_tol": None,
    "timing": None,
    "workers": None,
    "alpha": None,
    "vector": None,
    "model": {
        "name": None,
        "kappa": None,
        "omega": None,
        "levels": None,
        "value": None,
        "h": None,
        "hamiltonian": None,
        "matrices": {"S": None, "L": None, "H": None},
        "zero_coupling": None,
    },
    "squeeze": {"n": None, "theta": None, "n_list": None, "theta_grid": None},
    "drive": {"segments": None},
    "output": {"csv": None, "json": None},
}


def _check_keys(data, schema, path=""):
    if not isinstance(data, dict):
        raise ConfigError(f"config section {path or '<root>'} must be a mapping")
    for key, value in data.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {path + key!r}")
        sub = schema[key]
        if isinstance(sub, dict):
            _check_keys(value, sub, path + key + ".")


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config file {path!r}: {exc}") from exc
    _check_keys(data, CONFIG_SCHEMA)
    return data


def _as_complex(value, what="value") -> complex:
    """Complex scalar from a [re, im] pair, a number, or a '1+2j' string."""
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"cannot parse {what} {value!r} as complex") from exc
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"cannot parse {what} {value!r} as complex")


def _as_complex_matrix(rows, what="matrix") -> np.ndarray:
    try:
        return np.array(
            [[_as_complex(entry, what) for entry in row] for row in rows],
            dtype=complex,
        )
    except (TypeError, ConfigError) as exc:
        raise ConfigError(f"cannot parse {what}: {exc}") from exc


def _segments_from_config(raw) -> list:
    segs = []
    for item in raw:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ConfigError(f"drive segment {item!r} must be [duration, amplitude]")
        segs.append((float(item[0]), _as_complex(item[1], "segment amplitude")))
    return segs


def _parse_segments_flag(text: str) -> list:
    """Flag syntax: 'dur:re,im;dur:re,im' (imaginary part optional)."""
    segs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            dur, amp = chunk.split(":")
            parts = amp.split(",")
            re_part = float(parts[0])
            im_part = float(parts[1]) if len(parts) > 1 else 0.0
            segs.append((float(dur), complex(re_part, im_part)))
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"cannot parse segment {chunk!r}: {exc}") from exc
    if not segs:
        raise ConfigError("empty segment list")
    return segs


def _model_spec(cfg: dict, args) -> ModelSpec:
    section = dict(cfg.get("model") or {})
    name = args.model or section.get("name")
    if not name:
        raise ConfigError("no model selected (flag --model or config model.name)")
    name = name.lower()
    options = {}
    if name == "atom":
        options["kappa"] = args.kappa if args.kappa is not None else section.get("kappa", 1.0)
        ham = section.get("hamiltonian")
        if ham is not None:
            options["hamiltonian"] = _HashableMatrix(_as_complex_matrix(ham, "model.hamiltonian"))
    elif name == "cavity":
        options["kappa"] = args.kappa if args.kappa is not None else section.get("kappa", 1.0)
        options["omega"] = args.omega if args.omega is not None else section.get("omega", 1.0)
        options["levels"] = args.levels if args.levels is not None else section.get("levels", 20)
    elif name == "scalar":
        options["value"] = args.value if args.value is not None else section.get("value", 1.0)
        options["h"] = section.get("h", 0.0)
    elif name == "custom":
        matrices = section.get("matrices")
        if not matrices:
            raise ConfigError("custom model needs config model.matrices with S, L, H")
        for key in ("S", "L", "H"):
            if key not in matrices:
                raise ConfigError(f"custom model matrices missing {key!r}")
            options[key] = _HashableMatrix(_as_complex_matrix(matrices[key], f"model.matrices.{key}"))
    else:
        raise ConfigError(f"unknown model name {name!r}")
    if args.zero_coupling or section.get("zero_coupling"):
        options["zero_coupling"] = True
    return ModelSpec.of(name, **options)


class _HashableMatrix:
    """Immutable ndarray wrapper so matrices can sit inside a ModelSpec."""

    def __init__(self, array: np.ndarray):
        self.array = np.array(array, dtype=complex)
        self.array.setflags(write=False)

    def __hash__(self):
        return hash(self.array.tobytes())

    def __eq__(self, other):
        return isinstance(other, _HashableMatrix) and np.array_equal(self.array, other.array)

    def __array__(self, dtype=None):
        return self.array if dtype is None else self.array.astype(dtype)


def _resolve(args, cfg: dict, flag: str, *path, default=None):
    value = getattr(args, flag, None)
    if value is not None:
        return value
    node = cfg
    for key in path:
        if not isinstance(node, dict) or key not in node or node[key] is None:
            return default
        node = node[key]
    return node


def _step_function(args, cfg: dict, total_time: float) -> StepFunction:
    if getattr(args, "segments", None):
        return resolve_step_function(_parse_segments_flag(args.segments), total_time)
    raw = (cfg.get("drive") or {}).get("segments")
    if raw:
        return resolve_step_function(_segments_from_config(raw), total_time)
    return StepFunction.zero(total_time)


def _float_list(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(chunk) for chunk in str(text).split(",") if chunk.strip()]


# ---------------------------------------------------------------------------
# output

def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _output_path(args, cfg, kind: str):
    explicit = _resolve(args, cfg, kind, "output", kind)
    if explicit:
        return Path(explicit)
    return None


def _write_report(report: ConvergenceReport, args, cfg) -> list:
    written = []
    outdir = Path(getattr(args, "outdir", None) or os.environ.get(OUTPUT_DIR_ENV, "."))
    for kind in ("csv", "json"):
        path = _output_path(args, cfg, kind)
        if path is None:
            continue
        if not path.is_absolute():
            path = outdir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        if kind == "csv":
            path.write_text(report.to_csv(), encoding="utf-8")
        else:
            payload = json.dumps(report.to_json_dict(), indent=2, sort_keys=True,
                                 default=_json_default)
            path.write_text(payload + "\n", encoding="utf-8")
        written.append(str(path))
    return written


def _print_report(report: ConvergenceReport):
    rows = report.rows
    print("      n        theta            E_semigroup   E_collision   sup_dev       ||G(I)||      tail")
    for r in rows:
        cells = [
            f"{r.n:10.6g}",
            f"{r.theta:12.6g}",
            f"{r.e_semigroup:.10e}" if r.e_semigroup is not None else " " * 16,
            f"{r.e_collision:.6e}" if r.e_collision is not None else " " * 12,
            f"{r.sup_deviation:.6e}" if r.sup_deviation is not None else " " * 12,
            f"{r.generator_norm_at_i:.6e}" if r.generator_norm_at_i is not None else " " * 12,
            f"{r.tail_mass:.3e}" if r.tail_mass is not None else "",
        ]
        print("  ".join(cells).rstrip())
    if report.slope is not None:
        print(f"log-log slope: {report.slope:.6f}")


def _fail(failures: list) -> int:
    print(json.dumps({"failures": failures}, sort_keys=True, default=_json_default))
    return EXIT_FAILURE


# ---------------------------------------------------------------------------
# subcommands

def _cmd_verify(args, cfg) -> int:
    samples = int(_resolve(args, cfg, "samples", "samples", default=100))
    tol = float(_resolve(args, cfg, "tol", "tol", default=1e-10))
    seed = int(_resolve(args, cfg, "seed", "seed", default=2026))
    checks = identity_suite(samples=samples, tol=tol, seed=seed)
    failures = []
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: max error {check.max_error:.3e} "
              f"(tolerance {check.tolerance:g}) - {check.detail}")
        if not check.passed:
            failures.append({
                "check": check.name,
                "max_error": check.max_error,
                "tolerance": check.tolerance,
            })
    if failures:
        return _fail(failures)
    return EXIT_OK


def _squeeze_scalar(args, cfg) -> tuple:
    n = _resolve(args, cfg, "n", "squeeze", "n")
    theta = _resolve(args, cfg, "theta", "squeeze", "theta", default=0.0)
    if n is None:
        raise ConfigError("missing squeezing strength (flag --n or config squeeze.n)")
    return float(n), float(theta)


def _cmd_error(args, cfg) -> int:
    spec = _model_spec(cfg, args)
    n, theta = _squeeze_scalar(args, cfg)
    t = float(_resolve(args, cfg, "t", "time", default=1.0))
    params = make_squeeze_params(n, theta)
    model = spec.build()
    f = _step_function(args, cfg, t)
    vector = resolve_vector(model, _resolve(args, cfg, "vector", "vector"))
    e_semi = error_norm_squared(model, params, f, vector)
    print(f"model={model.label} n={n:g} theta={theta:g} t={t:g}")
    print(f"E_semigroup = {e_semi:.12e}")
    dt = _resolve(args, cfg, "dt", "dt")
    if dt is not None:
        e_coll = collision_error(model, params, f, vector, float(dt))
        print(f"E_collision = {e_coll:.12e} (dt={float(dt):g})")
    return EXIT_OK


def _sweep_common(args, cfg):
    spec = _model_spec(cfg, args)
    theta = float(_resolve(args, cfg, "theta", "squeeze", "theta", default=0.0))
    n_list = _resolve(args, cfg, "n_list", "squeeze", "n_list")
    if n_list is None:
        raise ConfigError("missing n list (flag --n-list or config squeeze.n_list)")
    t = float(_resolve(args, cfg, "t", "time", default=1.0))
    f = _step_function(args, cfg, t)
    vector = _resolve(args, cfg, "vector", "vector")
    return spec, theta, _float_list(n_list), t, f, vector


def _cmd_sweep(args, cfg) -> int:
    spec, theta, n_list, t, f, vector = _sweep_common(args, cfg)
    dt = _resolve(args, cfg, "dt", "dt")
    report = sweep_n(
        spec, theta, f, vector, t, n_list,
        collision_dt=float(dt) if dt is not None else None,
        workers=int(_resolve(args, cfg, "workers", "workers", default=1)),
        timing=bool(_resolve(args, cfg, "timing", "timing", default=False)),
    )
    _print_report(report)
    for path in _write_report(report, args, cfg):
        print(f"wrote {path}")
    bad = [r.n for r in report.rows if r.e_semigroup < -1e-9]
    if bad:
        return _fail([{"check": "error-nonnegative", "n": n} for n in bad])
    return EXIT_OK


def _cmd_rate(args, cfg) -> int:
    spec, theta, n_list, t, f, vector = _sweep_common(args, cfg)
    report = sweep_n(spec, theta, f, vector, t, n_list)
    try:
        slope = estimate_rate(report)
    except ValueError as exc:
        return _fail([{"check": "rate-fit", "reason": str(exc)}])
    report.slope = slope
    _print_report(report)
    for path in _write_report(report, args, cfg):
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_theta_scan(args, cfg) -> int:
    spec = _model_spec(cfg, args)
    n = _resolve(args, cfg, "n", "squeeze", "n")
    if n is None:
        raise ConfigError("missing squeezing strength (flag --n or config squeeze.n)")
    grid = _resolve(args, cfg, "theta_grid", "squeeze", "theta_grid")
    if grid is None:
        raise ConfigError("missing theta grid (flag --theta-grid or config squeeze.theta_grid)")
    t = float(_resolve(args, cfg, "t", "time", default=1.0))
    f = _step_function(args, cfg, t)
    vector = _resolve(args, cfg, "vector", "vector")
    report = theta_scan(
        spec, float(n), _float_list(grid), f, vector, t,
        workers=int(_resolve(args, cfg, "workers", "workers", default=1)),
        timing=bool(_resolve(args, cfg, "timing", "timing", default=False)),
    )
    _print_report(report)
    for path in _write_report(report, args, cfg):
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_tk_check(args, cfg) -> int:
    spec = _model_spec(cfg, args)
    n_list = _resolve(args, cfg, "n_list", "squeeze", "n_list")
    if n_list is None:
        raise ConfigError("missing n list (flag --n-list or config squeeze.n_list)")
    alpha = _as_complex(_resolve(args, cfg, "alpha", "alpha", default=0.0), "alpha")
    horizon = float(_resolve(args, cfg, "t", "time", default=1.0))
    theta = float(_resolve(args, cfg, "theta", "squeeze", "theta", default=0.0))
    report = tk_check(
        spec, alpha, horizon, _float_list(n_list), theta=theta,
        grid=int(_resolve(args, cfg, "grid", "grid", default=101)),
        workers=int(_resolve(args, cfg, "workers", "workers", default=1)),
        timing=bool(_resolve(args, cfg, "timing", "timing", default=False)),
    )
    _print_report(report)
    for path in _write_report(report, args, cfg):
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_oracle_compare(args, cfg) -> int:
    spec = _model_spec(cfg, args)
    n, theta = _squeeze_scalar(args, cfg)
    t = float(_resolve(args, cfg, "t", "time", default=1.0))
    dt = float(_resolve(args, cfg, "dt", "dt", default=1e-3))
    params = make_squeeze_params(n, theta)
    model = spec.build()
    f = _step_function(args, cfg, t)
    vector = resolve_vector(model, _resolve(args, cfg, "vector", "vector"))
    e_semi = error_norm_squared(model, params, f, vector)
    e_dt = collision_error(model, params, f, vector, dt)
    e_half = collision_error(model, params, f, vector, dt / 2.0)
    print(f"E_semigroup          = {e_semi:.12e}")
    print(f"E_collision(dt)      = {e_dt:.12e}   (dt={dt:g})")
    print(f"E_collision(dt/2)    = {e_half:.12e}")
    gap_dt = e_dt - e_semi
    gap_half = e_half - e_semi
    if abs(gap_half) < 1e-14:
        print("discretization gap below round-off; ratio not meaningful")
        return EXIT_OK
    ratio = gap_dt / gap_half
    print(f"step-halving ratio   = {ratio:.4f} (first-order convergence ~ 2)")
    if args.no_assert:
        return EXIT_OK
    lo, hi = args.ratio_min, args.ratio_max
    if not (lo <= ratio <= hi):
        return _fail([{
            "check": "step-halving-ratio",
            "ratio": ratio,
            "expected_range": [lo, hi],
        }])
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--outdir", default=None,
                        help=f"output directory (default: ${OUTPUT_DIR_ENV} or .)")
    parser.add_argument("--csv", default=None, help="CSV report path")
    parser.add_argument("--json", default=None, help="JSON report path")
    parser.add_argument("--timing", action="store_true", default=None,
                        help="record wall times (breaks byte-stable reports)")
    parser.add_argument("--workers", type=int, default=None)


def _add_model(parser: argparse.ArgumentParser):
    parser.add_argument("--model", choices=["atom", "cavity", "scalar", "custom"])
    parser.add_argument("--kappa", type=float, default=None)
    parser.add_argument("--omega", type=float, default=None)
    parser.add_argument("--levels", type=int, default=None)
    parser.add_argument("--value", type=float, default=None, help="scalar coupling")
    parser.add_argument("--zero-coupling", action="store_true", default=None,
                        help="replace L by 0 (trivial comparison)")
    parser.add_argument("--vector", default=None,
                        help="excited | ground | fock<k> | unit")
    parser.add_argument("--segments", default=None,
                        help="drive amplitude steps 'dur:re,im;dur:re,im'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squeezelim",
        description="verify the strong-squeezing approximation of quantum "
                    "stochastic dynamics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="re-derive the displayed algebraic identities")
    _add_common(p)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("error", help="single comparison-error evaluation")
    _add_common(p)
    _add_model(p)
    p.add_argument("--n", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--dt", type=float, default=None, help="also run the collision oracle")
    p.set_defaults(handler=_cmd_error)

    p = sub.add_parser("sweep", help="error across squeezing strengths")
    _add_common(p)
    _add_model(p)
    p.add_argument("--n-list", dest="n_list", default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("rate", help="sweep plus fitted log-log slope")
    _add_common(p)
    _add_model(p)
    p.add_argument("--n-list", dest="n_list", default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.set_defaults(handler=_cmd_rate)

    p = sub.add_parser("theta-scan", help="error across the squeezing phase")
    _add_common(p)
    _add_model(p)
    p.add_argument("--n", type=float, default=None)
    p.add_argument("--theta-grid", dest="theta_grid", default=None,
                   help="comma-separated phases")
    p.add_argument("--t", type=float, default=None)
    p.set_defaults(handler=_cmd_theta_scan)

    p = sub.add_parser("tk-check", help="generator norm vs deviation supremum")
    _add_common(p)
    _add_model(p)
    p.add_argument("--n-list", dest="n_list", default=None)
    p.add_argument("--alpha", default=None, help="drive amplitude, e.g. '1' or '0.5+0.2j'")
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--t", type=float, default=None, help="supremum horizon")
    p.add_argument("--grid", type=int, default=None)
    p.set_defaults(handler=_cmd_tk_check)

    p = sub.add_parser("oracle-compare", help="semigroup vs collision oracle")
    _add_common(p)
    _add_model(p)
    p.add_argument("--n", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--ratio-min", type=float, default=1.7)
    p.add_argument("--ratio-max", type=float, default=2.3)
    p.add_argument("--no-assert", action="store_true")
    p.set_defaults(handler=_cmd_oracle_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else {}
        return args.handler(args, cfg)
    except (ConfigError, DegeneratePhaseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(json.dumps({"failures": [{"check": "invariant", "reason": str(exc)}]}))
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
