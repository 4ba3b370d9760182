"""Dense complex matrix kernels: exponential, operator norm, vectorization lifts.

The matrix exponential uses Taylor scaling-and-squaring with an a-priori
remainder bound: the argument is scaled by a power of two until its 1-norm is
below 1/4, the series is summed until the tail bound drops below the stage
tolerance, and the result is squared back up.  The operator norm is the
square root of the dominant eigenvalue of the Gram matrix M*M (the exact
limit of power iteration on M*M).

Vectorization is column-stacking: ``vec(A X B) = kron(B.T, A) @ vec(X)``.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "dagger",
    "expm",
    "opnorm",
    "vec",
    "unvec",
    "lift_left",
    "lift_right",
    "lift_sandwich",
]

_TAYLOR_THETA = 0.25
_MAX_TERMS = 64
_MAX_SQUARINGS = 64


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def _norm1(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(m), axis=0)))


def expm(m: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Matrix exponential with truncation driven by ``tol``.

    Parameters
    ----------
    m : ndarray
        Square complex matrix.
    tol : float
        Requested accuracy of the scaled-stage Taylor remainder, in
        [1e-15, 1e-6].  The delivered operator-norm accuracy additionally
        carries the usual floating-point amplification of the squaring
        phase; for the contraction generators used in this package the
        result is accurate to a few ulps times the number of squarings.

    Raises
    ------
    ValueError
        For non-square input, non-finite entries, or tol outside range.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expm requires a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("expm input contains non-finite entries")
    if not (1e-15 <= tol <= 1e-6):
        raise ValueError(f"tol must lie in [1e-15, 1e-6], got {tol!r}")

    nrm = _norm1(a)
    d = a.shape[0]
    eye = np.eye(d, dtype=complex)
    if nrm == 0.0:
        return eye

    squarings = 0
    if nrm > _TAYLOR_THETA:
        squarings = int(math.ceil(math.log2(nrm / _TAYLOR_THETA)))
        if squarings > _MAX_SQUARINGS:
            raise ValueError(f"matrix norm {nrm:.3e} too large for expm")
        a = a / (2.0 ** squarings)
    stage_tol = tol / (2.0 ** (squarings + 1))

    # Taylor sum with running tail bound: the next term is bounded by
    # ||term|| * theta / (j + 1), and the full tail by the geometric series.
    result = eye + a
    term = a
    j = 1
    while j < _MAX_TERMS:
        term_norm = _norm1(term)
        q = _TAYLOR_THETA / (j + 1)
        tail = term_norm * q / (1.0 - _TAYLOR_THETA / (j + 2))
        if tail <= stage_tol:
            break
        j += 1
        term = (term @ a) / j
        result = result + term
    else:
        raise RuntimeError("expm Taylor sum failed to converge")

    for _ in range(squarings):
        result = result @ result
    return result


def opnorm(m: np.ndarray) -> float:
    """Largest singular value (operator norm) of a dense complex matrix.

    Computed as sqrt of the dominant eigenvalue of M*M; entries are scaled
    first so the Gram matrix cannot overflow.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"opnorm requires a matrix, got ndim={a.ndim}")
    if a.size == 0:
        return 0.0
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return 0.0
    b = a / scale
    gram = b.conj().T @ b
    evals = np.linalg.eigvalsh(gram)
    return scale * math.sqrt(max(float(evals[-1]), 0.0))


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(x, dtype=complex).reshape(-1, order="F")


def unvec(w: np.ndarray, d: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`; ``d`` defaults to the square root of the length."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    if d is None:
        d = int(round(math.sqrt(w.shape[0])))
    if d * d != w.shape[0]:
        raise ValueError(f"length {w.shape[0]} is not a perfect square")
    return w.reshape((d, d), order="F")


def lift_left(a: np.ndarray) -> np.ndarray:
    """Superoperator matrix of X -> A X."""
    a = np.asarray(a, dtype=complex)
    return np.kron(np.eye(a.shape[0], dtype=complex), a)


def lift_right(b: np.ndarray) -> np.ndarray:
    """Superoperator matrix of X -> X B."""
    b = np.asarray(b, dtype=complex)
    return np.kron(b.T, np.eye(b.shape[0], dtype=complex))


def lift_sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator matrix of X -> A X B."""
    return np.kron(np.asarray(b, dtype=complex).T, np.asarray(a, dtype=complex))
