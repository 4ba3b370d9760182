"""Verification campaigns: squeezing-strength sweeps, rate fits, phase scans,
generator-versus-semigroup deviation checks and truncation diagnostics.

Every campaign produces a :class:`ConvergenceReport` with one row per
parameter point.  Rows are computed independently (optionally on a thread
pool) and assembled in key order, so reports are deterministic regardless of
scheduling.  Timing is off by default to keep serialized reports
byte-stable.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .collision import collision_error
from .model import ModelSpec, SystemModel, make_squeeze_params, resolve_vector
from .numkernel import opnorm
from .semigroup import (
    StepFunction,
    build_transfer_generator,
    resolve_step_function,
    sup_deviation,
    transfer_composition,
)

__all__ = [
    "ReportRow",
    "ConvergenceReport",
    "sweep_n",
    "estimate_rate",
    "theta_scan",
    "tk_check",
    "truncation_agreement",
]

CSV_COLUMNS = (
    "n",
    "theta",
    "t",
    "dt",
    "E_semigroup",
    "E_collision",
    "sup_deviation",
    "generator_norm_at_I",
    "tail_mass",
    "wall_ms",
)

TAIL_MASS_WARN = 1e-6
THETA_GUARD = 0.05


@dataclass(frozen=True)
class ReportRow:
    n: float
    theta: float
    t: float | None = None
    dt: float | None = None
    e_semigroup: float | None = None
    e_collision: float | None = None
    sup_deviation: float | None = None
    generator_norm_at_i: float | None = None
    tail_mass: float | None = None
    wall_ms: float | None = None
    s2: float | None = None  # phase-scan convenience; not a CSV column

    def csv_values(self) -> tuple:
        return (
            self.n,
            self.theta,
            self.t,
            self.dt,
            self.e_semigroup,
            self.e_collision,
            self.sup_deviation,
            self.generator_norm_at_i,
            self.tail_mass,
            self.wall_ms,
        )


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".12g")


@dataclass
class ConvergenceReport:
    descriptor: dict
    rows: list = field(default_factory=list)
    slope: float | None = None
    intercept: float | None = None

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row.csv_values()))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "rows": [asdict(row) for row in self.rows],
            "slope": self.slope,
            "intercept": self.intercept,
        }


def _as_spec(model_spec) -> ModelSpec:
    if isinstance(model_spec, ModelSpec):
        return model_spec
    if isinstance(model_spec, SystemModel):
        raise TypeError(
            "experiments need a rebuildable ModelSpec, not a built SystemModel"
        )
    raise TypeError(f"unsupported model spec {model_spec!r}")


def _is_cavity(spec: ModelSpec) -> bool:
    return spec.name.lower() == "cavity"


def _map_rows(fn, keys, workers: int = 1) -> list:
    if workers <= 1:
        return [fn(key) for key in keys]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, keys))


def _fit_loglog(rows) -> tuple:
    """Least-squares slope/intercept of log E vs log n over the largest half."""
    usable = [r for r in rows if r.e_semigroup is not None]
    window = usable[len(usable) // 2:]
    if any(r.e_semigroup <= 0.0 for r in window):
        raise ValueError("nonpositive error value in the rate-fit window")
    xs = np.log([r.n for r in window])
    ys = np.log([r.e_semigroup for r in window])
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(slope), float(intercept)


def sweep_n(model_spec, theta: float, f, v, t: float, n_list,
            collision_dt: float | None = None, workers: int = 1,
            timing: bool = False, expm_tol: float = 1e-12) -> ConvergenceReport:
    """Error functional across squeezing strengths at fixed phase and drive."""
    spec = _as_spec(model_spec)
    n_list = [float(n) for n in n_list]
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing with at least 2 entries")
    f = resolve_step_function(f, t)
    model = spec.build()
    vector = resolve_vector(model, v)
    cavity = _is_cavity(spec)

    def row(n: float) -> ReportRow:
        start = time.perf_counter()
        params = make_squeeze_params(n, theta)
        comp = transfer_composition(model, params, f, expm_tol)
        e_semi = comp.error(vector)
        tail = None
        if cavity:
            tail = comp.tail_mass(vector)
            if tail > TAIL_MASS_WARN:
                warnings.warn(
                    f"top-level population {tail:.3e} exceeds {TAIL_MASS_WARN:g} at "
                    f"n={n}; increase the truncation level",
                    stacklevel=2,
                )
        e_coll = None
        if collision_dt is not None:
            e_coll = collision_error(model, params, f, vector, collision_dt)
        wall = (time.perf_counter() - start) * 1e3 if timing else None
        return ReportRow(n=n, theta=theta, t=f.total_time, dt=collision_dt,
                         e_semigroup=e_semi, e_collision=e_coll, tail_mass=tail,
                         wall_ms=wall, s2=params.s2)

    rows = _map_rows(row, n_list, workers)
    report = ConvergenceReport(
        descriptor={
            "kind": "sweep_n",
            "model": {"name": spec.name, "options": dict(spec.options)},
            "theta": theta,
            "t": f.total_time,
            "segments": [[d, [a.real, a.imag]] for d, a in f.segments],
            "collision_dt": collision_dt,
        },
        rows=rows,
    )
    if len(rows) >= 4:
        try:
            report.slope, report.intercept = _fit_loglog(rows)
        except ValueError:
            pass  # fit is advisory inside sweeps; estimate_rate enforces
    return report


def estimate_rate(report: ConvergenceReport) -> float:
    """Fitted log-log slope over the largest half of the sweep; the small-n
    rows are pre-asymptotic and excluded by design."""
    rows = [r for r in report.rows if r.e_semigroup is not None]
    if len(rows) < 4:
        raise ValueError("rate estimation needs at least 4 rows")
    slope, _ = _fit_loglog(rows)
    return slope


def theta_scan(model_spec, n: float, theta_grid, f, v, t: float,
               workers: int = 1, timing: bool = False,
               expm_tol: float = 1e-12) -> ConvergenceReport:
    """Error functional across the squeezing phase at fixed strength."""
    spec = _as_spec(model_spec)
    thetas = [float(th) for th in theta_grid]
    if not thetas:
        raise ValueError("theta grid is empty")
    if any(abs(th) > math.pi - THETA_GUARD for th in thetas):
        raise ValueError(
            f"theta grid touches the guard band: all |theta| must be <= "
            f"{math.pi - THETA_GUARD:.6f}"
        )
    f = resolve_step_function(f, t)
    model = spec.build()
    vector = resolve_vector(model, v)
    cavity = _is_cavity(spec)

    def row(theta: float) -> ReportRow:
        start = time.perf_counter()
        params = make_squeeze_params(n, theta)
        comp = transfer_composition(model, params, f, expm_tol)
        e_semi = comp.error(vector)
        tail = comp.tail_mass(vector) if cavity else None
        wall = (time.perf_counter() - start) * 1e3 if timing else None
        return ReportRow(n=n, theta=theta, t=f.total_time, e_semigroup=e_semi,
                         tail_mass=tail, wall_ms=wall, s2=params.s2)

    rows = _map_rows(row, thetas, workers)
    return ConvergenceReport(
        descriptor={
            "kind": "theta_scan",
            "model": {"name": spec.name, "options": dict(spec.options)},
            "n": n,
            "t": f.total_time,
            "segments": [[d, [a.real, a.imag]] for d, a in f.segments],
        },
        rows=rows,
    )


def tk_check(model_spec, alpha: complex, horizon: float, n_list, theta: float = 0.0,
             grid: int = 101, workers: int = 1, timing: bool = False,
             expm_tol: float = 1e-12) -> ConvergenceReport:
    """Generator norm at the identity next to the grid supremum of
    ||T_t(I) - I||: the two equivalent smallness certificates, tabulated."""
    spec = _as_spec(model_spec)
    n_list = [float(n) for n in n_list]
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing with at least 2 entries")
    model = spec.build()

    def row(n: float) -> ReportRow:
        start = time.perf_counter()
        params = make_squeeze_params(n, theta)
        gen = build_transfer_generator(model, params, alpha)
        gnorm = opnorm(gen.at_identity())
        dev = sup_deviation(model, params, alpha, horizon, grid, expm_tol)
        wall = (time.perf_counter() - start) * 1e3 if timing else None
        return ReportRow(n=n, theta=theta, t=horizon, sup_deviation=dev,
                         generator_norm_at_i=gnorm, wall_ms=wall,
                         s2=params.s2)

    rows = _map_rows(row, n_list, workers)
    return ConvergenceReport(
        descriptor={
            "kind": "tk_check",
            "model": {"name": spec.name, "options": dict(spec.options)},
            "alpha": [complex(alpha).real, complex(alpha).imag],
            "horizon": horizon,
            "theta": theta,
            "grid": grid,
        },
        rows=rows,
    )


def truncation_agreement(cavity_spec: ModelSpec, n_list, theta: float, f, v,
                         t: float, bump: int = 5, expm_tol: float = 1e-12) -> dict:
    """Compare a cavity run against the same run with a deeper truncation.

    Returns per-n rows with both error values, their difference and both tail
    masses; faithful truncation means tiny tails and matching errors.
    """
    spec = _as_spec(cavity_spec)
    if not _is_cavity(spec):
        raise ValueError("truncation agreement applies to cavity specs only")
    levels = dict(spec.options).get("levels", 20)
    deeper = spec.with_option("levels", int(levels) + int(bump))
    base = sweep_n(spec, theta, f, v, t, n_list, expm_tol=expm_tol)
    more = sweep_n(deeper, theta, f, v, t, n_list, expm_tol=expm_tol)
    rows = []
    for r1, r2 in zip(base.rows, more.rows):
        rows.append({
            "n": r1.n,
            "e_base": r1.e_semigroup,
            "e_deeper": r2.e_semigroup,
            "difference": abs(r1.e_semigroup - r2.e_semigroup),
            "tail_base": r1.tail_mass,
            "tail_deeper": r2.tail_mass,
        })
    return {
        "levels": int(levels),
        "levels_deeper": int(levels) + int(bump),
        "rows": rows,
    }
