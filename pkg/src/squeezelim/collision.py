"""Repeated-interaction oracle for the comparison error.

One fresh two-level ancilla per time slice: the field increments over a slice
of length dt act as sqrt(dt) sigma_plus / sigma_minus on that ancilla, so a
QSDE with creation coefficient C and effective Hamiltonian Heff discretizes
to the strictly unitary step

    exp( sqrt(dt) (C (x) sigma_plus - C* (x) sigma_minus) - i dt Heff (x) I ).

The vacuum block of its expansion reproduces the Ito drift -(1/2) C*C dt
automatically, so no drift has to be inserted by hand.  Contracting the
slices one ancilla at a time against the ancilla vacuum gives the discrete
transfer operator; the same slices applied to a full joint state give an
exact cross-check of the contraction.  Neither path uses superoperator
exponentials, which makes this an independent oracle for the semigroup
route.  The drive amplitude is folded into the slice coefficients per
segment, keeping every ancilla in the vacuum.

Only identity scattering is supported; the gauge increment has no faithful
two-level dilation and both worked examples ship with S = I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SqueezeParams, SystemModel, derived_coefficients
from .numkernel import dagger, expm, opnorm

__all__ = [
    "UnsupportedConfigurationError",
    "CollisionResult",
    "step_unitary",
    "collision_error",
    "collision_report",
    "brute_force_error",
]

ANCILLA_RAISE = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |0> -> |1>
ANCILLA_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

MAX_BRUTE_ANCILLAS = 12


class UnsupportedConfigurationError(ValueError):
    """Raised for configurations the discrete oracle cannot dilate (S != I)."""


def step_unitary(coeff: np.ndarray, heff: np.ndarray, dt: float,
                 expm_tol: float = 1e-13) -> np.ndarray:
    """One collision unitary on system (x) ancilla.

    ``coeff`` is the creation-side coefficient of the slice, ``heff`` the
    Hermitian effective Hamiltonian (everything in the drift except the
    -(1/2) coeff*coeff part, which the exponential generates itself).
    """
    coeff = np.asarray(coeff, dtype=complex)
    heff = np.asarray(heff, dtype=complex)
    if coeff.shape != heff.shape or coeff.ndim != 2 or coeff.shape[0] != coeff.shape[1]:
        raise ValueError("coeff and heff must be square matrices of equal size")
    if np.max(np.abs(heff - dagger(heff))) >= 1e-10:
        raise ValueError("effective Hamiltonian is not Hermitian (tolerance 1e-10)")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    eye2 = np.eye(2, dtype=complex)
    generator = (
        np.sqrt(dt) * (np.kron(coeff, ANCILLA_RAISE) - np.kron(dagger(coeff), ANCILLA_LOWER))
        - 1j * dt * np.kron(heff, eye2)
    )
    return expm(generator, expm_tol)


def _require_identity_scattering(model: SystemModel):
    if np.max(np.abs(model.S - np.eye(model.d))) > 1e-12:
        raise UnsupportedConfigurationError(
            "the collision oracle supports identity scattering only"
        )


def _snap_segments(f, dt: float, min_steps: int) -> list:
    """Snap segment durations to the dt grid; reject coarse rounding."""
    segments = f.segments if hasattr(f, "segments") else tuple(f)
    snapped = []
    for duration, alpha in segments:
        steps = int(round(duration / dt))
        if steps < min_steps:
            raise ValueError(
                f"segment of duration {duration!r} resolves to {steps} steps at "
                f"dt={dt!r}; needs at least {min_steps}"
            )
        if abs(steps * dt - duration) > 1e-6 * duration:
            raise ValueError(
                f"segment duration {duration!r} is not a multiple of dt={dt!r} "
                "within relative tolerance 1e-6"
            )
        snapped.append((steps, complex(alpha)))
    return snapped


def _segment_step_pair(model: SystemModel, params: SqueezeParams, alpha: complex,
                       dt: float, expm_tol: float) -> tuple:
    """Slice unitaries (U, V) for one constant-amplitude segment."""
    coeffs = derived_coefficients(model, params)
    eye = np.eye(model.d, dtype=complex)
    lnc = coeffs.Lnc
    fnc = coeffs.Fnc
    heff_u = model.H + 0.5j * (np.conj(alpha) * lnc - alpha * dagger(lnc))
    heff_v = model.H + coeffs.Hnc + 0.5j * (np.conj(alpha) * fnc - alpha * dagger(fnc))
    u = step_unitary(lnc + alpha * eye, heff_u, dt, expm_tol)
    v = step_unitary(fnc + alpha * eye, heff_v, dt, expm_tol)
    return u, v


@dataclass(frozen=True)
class CollisionResult:
    error: float
    dt: float
    steps: int
    max_transfer_norm: float


def collision_report(model: SystemModel, params: SqueezeParams, f, v, dt: float,
                     min_steps_per_segment: int = 10,
                     allow_unnormalized: bool = False,
                     expm_tol: float = 1e-13) -> CollisionResult:
    """Discrete transfer contraction with diagnostics.

    Starting from the identity, each slice maps X -> <0| V* (X (x) I) U |0>
    with the partial inner product over that slice's ancilla, walking
    backwards in time; the error is < v, (2I - X0 - X0*) v >.
    """
    _require_identity_scattering(model)
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != model.d:
        raise ValueError(f"vector length {v.shape[0]} != dimension {model.d}")
    if not allow_unnormalized and abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("reference vector is not normalized (pass allow_unnormalized)")
    snapped = _snap_segments(f, dt, min_steps_per_segment)

    d = model.d
    eye2 = np.eye(2, dtype=complex)
    x = np.eye(d, dtype=complex)
    max_norm = 0.0
    total_steps = 0
    for steps, alpha in reversed(snapped):
        u, vmat = _segment_step_pair(model, params, alpha, dt, expm_tol)
        vdag = dagger(vmat)
        for _ in range(steps):
            x = (vdag @ np.kron(x, eye2) @ u)[0::2, 0::2]
            max_norm = max(max_norm, opnorm(x))
        total_steps += steps
    value = complex(2.0 * np.vdot(v, v) - np.vdot(v, x @ v) - np.vdot(v, dagger(x) @ v))
    if abs(value.imag) > 1e-9:
        raise AssertionError(f"discrete error functional has imaginary part {value.imag:.3e}")
    return CollisionResult(error=value.real, dt=dt, steps=total_steps,
                           max_transfer_norm=max_norm)


def collision_error(model: SystemModel, params: SqueezeParams, f, v, dt: float,
                    min_steps_per_segment: int = 10,
                    allow_unnormalized: bool = False,
                    expm_tol: float = 1e-13) -> float:
    """Discrete-oracle value of the comparison error; see :func:`collision_report`."""
    return collision_report(
        model, params, f, v, dt,
        min_steps_per_segment=min_steps_per_segment,
        allow_unnormalized=allow_unnormalized,
        expm_tol=expm_tol,
    ).error


def _apply_two_site(u: np.ndarray, state: np.ndarray, ancilla_axis: int, d: int) -> np.ndarray:
    """Apply a (system, one-ancilla) unitary to a joint state tensor."""
    u4 = u.reshape(d, 2, d, 2)
    moved = np.tensordot(u4, state, axes=([2, 3], [0, ancilla_axis]))
    # tensordot puts the fresh (system, ancilla) axes first; restore ordering.
    return np.moveaxis(moved, 1, ancilla_axis)


def brute_force_error(model: SystemModel, params: SqueezeParams, f, v, dt: float,
                      allow_unnormalized: bool = False,
                      expm_tol: float = 1e-13) -> float:
    """Exact joint-state computation on system (x) all ancillas.

    Builds the identical slice unitaries, applies them to v (x) |0...0> for
    both evolutions, and returns the squared distance of the results.  Must
    agree with :func:`collision_error` on the same discretization to
    round-off; the state dimension d * 2**steps caps the step count.
    """
    _require_identity_scattering(model)
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != model.d:
        raise ValueError(f"vector length {v.shape[0]} != dimension {model.d}")
    if not allow_unnormalized and abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("reference vector is not normalized (pass allow_unnormalized)")
    snapped = _snap_segments(f, dt, min_steps=1)
    total_steps = sum(steps for steps, _ in snapped)
    if total_steps > MAX_BRUTE_ANCILLAS:
        raise ValueError(
            f"{total_steps} slices exceed the joint-state cap of {MAX_BRUTE_ANCILLAS}"
        )

    d = model.d
    state_u = np.zeros((d,) + (2,) * total_steps, dtype=complex)
    state_u[(slice(None),) + (0,) * total_steps] = v
    state_v = state_u.copy()
    k = 0
    for steps, alpha in snapped:
        u, vmat = _segment_step_pair(model, params, alpha, dt, expm_tol)
        for _ in range(steps):
            axis = 1 + k
            state_u = _apply_two_site(u, state_u, axis, d)
            state_v = _apply_two_site(vmat, state_v, axis, d)
            k += 1
    diff = state_u - state_v
    return float(np.vdot(diff, diff).real)
