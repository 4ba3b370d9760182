"""Transfer semigroup of the comparison dynamics and the error functional.

The squared residual between the exact unitary evolution and its commutative
approximation, launched from a system vector tensored with a coherent field
vector, reduces to a product of norm-continuous contraction semigroups acting
on system operators: one factor per constant segment of the coherent
amplitude.  This module assembles the generator of each factor as a d^2 x d^2
superoperator, exponentiates it, and evaluates

    E = < v, (2 I - T(I) - T(I)*) v >,

where T is the segment-ordered composition applied to the identity operator.

The full-operator generator is not hand-entered: it is produced by the
symbolic vacuum reduction in :mod:`squeezelim.ito_algebra` and mapped to
matrices letter by letter.  Its specialization at the identity is checked at
construction time against the independently computed closed form.  The
scattering matrix only enters the dropped stochastic terms, so the assembled
generator does not depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import ito_algebra as ia
from .model import Coefficients, SqueezeParams, SystemModel, derived_coefficients
from .numkernel import dagger, expm, opnorm, unvec, vec

__all__ = [
    "StepFunction",
    "TransferGenerator",
    "TransferComposition",
    "build_transfer_generator",
    "assemble_superoperator",
    "transfer_composition",
    "transfer_apply",
    "error_norm_squared",
    "sup_deviation",
]

GENERATOR_CHECK_TOL = 1e-10


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant coherent amplitude: ordered (duration, value) pairs."""

    segments: tuple

    def __post_init__(self):
        segs = []
        for duration, amplitude in self.segments:
            duration = float(duration)
            if not duration > 0.0 or not np.isfinite(duration):
                raise ValueError(f"segment durations must be positive, got {duration!r}")
            segs.append((duration, complex(amplitude)))
        object.__setattr__(self, "segments", tuple(segs))

    @classmethod
    def from_segments(cls, segments) -> "StepFunction":
        return cls(tuple(segments))

    @classmethod
    def zero(cls, total_time: float) -> "StepFunction":
        """Vanishing amplitude over [0, total_time] as a single segment."""
        return cls(((float(total_time), 0j),))

    @property
    def total_time(self) -> float:
        return sum(duration for duration, _ in self.segments)


def resolve_step_function(f, total_time: float | None = None) -> StepFunction:
    """Accept a StepFunction, a raw segment list, or None/empty meaning a
    vanishing amplitude over [0, total_time]."""
    if f is None:
        if total_time is None:
            raise ValueError("need a total time to build a vanishing amplitude")
        return StepFunction.zero(total_time)
    if not isinstance(f, StepFunction):
        f = StepFunction.from_segments(f)
    if not f.segments:
        if total_time is None:
            raise ValueError("need a total time to build a vanishing amplitude")
        return StepFunction.zero(total_time)
    if total_time is not None and abs(f.total_time - total_time) > 1e-9 * max(1.0, total_time):
        raise ValueError(
            f"segments sum to {f.total_time!r}, expected total time {total_time!r}"
        )
    return f


@dataclass(frozen=True)
class TransferGenerator:
    """Superoperator generator on vectorized d x d operators for one segment."""

    d: int
    matrix: np.ndarray
    alpha: complex
    model: SystemModel
    params: SqueezeParams

    def at_identity(self) -> np.ndarray:
        """Generator applied to the identity operator, as a d x d matrix."""
        return unvec(self.matrix @ vec(np.eye(self.d)), self.d)


@lru_cache(maxsize=1)
def _generator_polynomial() -> ia.ItoExpression:
    left, right = ia.transfer_qsde_pair()
    return ia.vacuum_generator(left, right, x_name="X")


def _letter_matrices(model: SystemModel, coeffs: Coefficients) -> dict:
    return {
        "L": model.L,
        "Lstar": dagger(model.L),
        "S": model.S,
        "Sstar": dagger(model.S),
        "H": model.H,
        "Hnc": coeffs.Hnc,
    }


def assemble_superoperator(poly: ia.ItoExpression, model: SystemModel,
                           params: SqueezeParams, alpha: complex) -> np.ndarray:
    """Map a system-word polynomial with one X slot per word to the matrix of
    the superoperator X -> sum coeff * (left word) X (right word)."""
    d = model.d
    point = ia.EvalPoint(params, complex(alpha))
    letters = _letter_matrices(model, derived_coefficients(model, params))
    eye = np.eye(d, dtype=complex)
    out = np.zeros((d * d, d * d), dtype=complex)
    for (word, diff), coeff in poly.terms.items():
        if diff is not None:
            raise ValueError("generator polynomial must be increment-free")
        z = coeff(point) if callable(coeff) else complex(coeff)
        left = eye
        right = eye
        side = "left"
        seen_x = False
        for letter in word:
            if letter == "X":
                if seen_x:
                    raise ValueError(f"word {word!r} carries more than one X slot")
                seen_x = True
                side = "right"
                continue
            if letter == "Alpha":
                z *= point.alpha
                continue
            if letter == "AlphaBar":
                z *= point.alpha.conjugate()
                continue
            m = letters[letter]
            if side == "left":
                left = left @ m
            else:
                right = right @ m
        if not seen_x:
            raise ValueError(f"word {word!r} carries no X slot")
        out += z * np.kron(right.T, left)
    return out


def build_transfer_generator(model: SystemModel, params: SqueezeParams,
                             alpha: complex = 0j, validate: bool = True) -> TransferGenerator:
    """Assemble the segment generator for drive amplitude ``alpha``.

    With ``validate=True`` the action on the identity is compared against the
    closed form -(1/2)(Lnc-Fnc)*(Lnc-Fnc) + abar(Lnc-Fnc) - a(Lnc-Fnc)*.
    """
    matrix = assemble_superoperator(_generator_polynomial(), model, params, alpha)
    gen = TransferGenerator(d=model.d, matrix=matrix, alpha=complex(alpha),
                            model=model, params=params)
    if validate:
        coeffs = derived_coefficients(model, params)
        diff = coeffs.Lnc - coeffs.Fnc
        expected = (
            -0.5 * dagger(diff) @ diff
            + np.conj(alpha) * diff
            - alpha * dagger(diff)
        )
        err = float(np.max(np.abs(gen.at_identity() - expected)))
        if err >= GENERATOR_CHECK_TOL:
            raise AssertionError(
                f"assembled generator deviates from its closed form at the identity "
                f"by {err:.3e}"
            )
    return gen


@dataclass(frozen=True)
class TransferComposition:
    """Segment-ordered product of exponentiated generators, applied on demand."""

    model: SystemModel
    params: SqueezeParams
    f: StepFunction
    matrix: np.ndarray  # d^2 x d^2 product, first segment outermost

    def evolved_identity(self) -> np.ndarray:
        d = self.model.d
        return unvec(self.matrix @ vec(np.eye(d)), d)

    def error(self, v: np.ndarray, allow_unnormalized: bool = False) -> float:
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.shape[0] != self.model.d:
            raise ValueError(f"vector length {v.shape[0]} != dimension {self.model.d}")
        if not allow_unnormalized and abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("reference vector is not normalized (pass allow_unnormalized)")
        m = self.evolved_identity()
        value = complex(
            2.0 * np.vdot(v, v) - np.vdot(v, m @ v) - np.vdot(v, dagger(m) @ v)
        )
        if abs(value.imag) > 1e-9:
            raise AssertionError(f"error functional has imaginary part {value.imag:.3e}")
        if value.real < -1e-9:
            raise AssertionError(f"error functional is negative: {value.real:.3e}")
        return value.real

    def backpropagated_density(self, v: np.ndarray) -> np.ndarray:
        """Adjoint propagation of |v><v| through the composition; its diagonal
        measures how much weight the evaluation places on each level."""
        v = np.asarray(v, dtype=complex).reshape(-1)
        rho = np.outer(v, v.conj())
        return unvec(dagger(self.matrix) @ vec(rho), self.model.d)

    def tail_mass(self, v: np.ndarray) -> float:
        """Population pushed onto the top truncation level by the evaluation."""
        rho = self.backpropagated_density(v)
        return float(abs(rho[-1, -1]))


def transfer_composition(model: SystemModel, params: SqueezeParams, f,
                         expm_tol: float = 1e-12) -> TransferComposition:
    f = resolve_step_function(f)
    d = model.d
    product = np.eye(d * d, dtype=complex)
    for duration, alpha in f.segments:
        gen = build_transfer_generator(model, params, alpha)
        product = product @ expm(duration * gen.matrix, expm_tol)
    return TransferComposition(model=model, params=params, f=f, matrix=product)


def transfer_apply(gen: TransferGenerator, x: np.ndarray, t: float,
                   expm_tol: float = 1e-12) -> np.ndarray:
    """Evolve an operator for time ``t`` under one segment generator."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (gen.d, gen.d):
        raise ValueError(f"operator shape {x.shape} != ({gen.d}, {gen.d})")
    return unvec(expm(t * gen.matrix, expm_tol) @ vec(x), gen.d)


def error_norm_squared(model: SystemModel, params: SqueezeParams, f, v,
                       allow_unnormalized: bool = False,
                       expm_tol: float = 1e-12) -> float:
    """Squared residual of exact versus commutative evolution on v (x) psi(f).

    ``f`` is the piecewise-constant coherent amplitude; segments compose in
    order with their own durations, first segment outermost.  The result is
    real within 1e-9 and nonnegative within 1e-9 (both enforced).
    """
    comp = transfer_composition(model, params, f, expm_tol)
    return comp.error(v, allow_unnormalized=allow_unnormalized)


def sup_deviation(model: SystemModel, params: SqueezeParams, alpha: complex,
                  horizon: float, grid: int = 101, expm_tol: float = 1e-12) -> float:
    """Grid approximation of sup over [0, horizon] of ||T_t(I) - I||."""
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon!r}")
    grid = int(grid)
    if grid < 2:
        raise ValueError(f"grid must have at least 2 points, got {grid}")
    gen = build_transfer_generator(model, params, alpha)
    d = model.d
    eye = np.eye(d, dtype=complex)
    step = expm((horizon / (grid - 1)) * gen.matrix, expm_tol)
    w = vec(eye)
    worst = 0.0
    for k in range(grid):
        if k:
            w = step @ w
        worst = max(worst, opnorm(unvec(w, d) - eye))
    return worst
