"""Squeezing parameters, finite-dimensional system models and derived couplings.

A single bosonic channel in a squeezed Gaussian state is parameterized by a
strength ``n > 0`` and a phase ``theta``: the pair correlation is
``c = sqrt(n(n+1)) exp(i*theta)``, its real part ``a``, and the amplified
quadrature carries the variance scale ``s2 = 2n + 1 + 2a``.  From a bounded
system coupling operator ``L`` the module derives the three operators that
drive the comparison dynamics:

* ``Lnc`` -- the exact coupling after rotating the squeezed noise into the
  standard annihilation/creation pair,
* ``Fnc`` -- its strong-squeezing replacement, skew-selfadjoint so that the
  replaced dynamics is driven by a single commuting quadrature,
* ``Hnc`` -- the correction Hamiltonian the commutative approximation picks
  up.

Two concrete systems are provided: a two-level atom (``L = kappa*sigma_minus``)
and a cavity mode truncated at a finite ladder level.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegeneratePhaseError",
    "SqueezeParams",
    "SystemModel",
    "Coefficients",
    "ModelSpec",
    "make_squeeze_params",
    "derived_coefficients",
    "atom_model",
    "cavity_model",
    "scalar_model",
    "custom_model",
    "build_model",
    "default_vector",
    "resolve_vector",
]

#: smallest admissible quadrature scale; below this the approximation error
#: diverges instead of vanishing, so construction is refused.
PHASE_GUARD = 1e-9

SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


class DegeneratePhaseError(ValueError):
    """Raised when the squeezing phase makes the amplified variance collapse."""


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing strength ``n`` and phase ``theta`` with all derived scalars."""

    n: float
    theta: float
    c: complex = field(init=False, repr=False)
    cbar: complex = field(init=False, repr=False)
    a: float = field(init=False, repr=False)
    s2: float = field(init=False, repr=False)
    s: float = field(init=False, repr=False)

    def __post_init__(self):
        n = float(self.n)
        theta = float(self.theta)
        if not math.isfinite(n) or n <= 0.0:
            raise ValueError(f"squeezing strength must be positive, got n={n!r}")
        if not math.isfinite(theta) or not (-math.pi < theta < math.pi):
            raise DegeneratePhaseError(
                f"degenerate squeezing phase: theta={theta!r} must lie in the open "
                "interval (-pi, pi)"
            )
        c = math.sqrt(n * (n + 1.0)) * cmath.exp(1j * theta)
        a = c.real
        s2 = 2.0 * n + 1.0 + 2.0 * a
        if s2 < PHASE_GUARD:
            raise DegeneratePhaseError(
                f"degenerate squeezing phase: variance scale s2={s2!r} below guard "
                f"{PHASE_GUARD!r} (n={n}, theta={theta})"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "cbar", c.conjugate())
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "s2", s2)
        object.__setattr__(self, "s", math.sqrt(s2))


def make_squeeze_params(n: float, theta: float) -> SqueezeParams:
    """Validate ``(n, theta)`` and populate all derived constants."""
    return SqueezeParams(n, theta)


def _frozen_matrix(value, name: str) -> np.ndarray:
    m = np.array(value, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class SystemModel:
    """Finite-dimensional system: unitary scattering S, coupling L, Hamiltonian H."""

    S: np.ndarray
    L: np.ndarray
    H: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        S = _frozen_matrix(self.S, "S")
        L = _frozen_matrix(self.L, "L")
        H = _frozen_matrix(self.H, "H")
        if not (S.shape == L.shape == H.shape):
            raise ValueError(
                f"S, L, H must share one dimension, got {S.shape}, {L.shape}, {H.shape}"
            )
        d = S.shape[0]
        if np.max(np.abs(S @ S.conj().T - np.eye(d))) >= 1e-10:
            raise ValueError("scattering matrix S is not unitary (tolerance 1e-10)")
        if np.max(np.abs(H - H.conj().T)) >= 1e-10:
            raise ValueError("Hamiltonian H is not self-adjoint (tolerance 1e-10)")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "H", H)

    @property
    def d(self) -> int:
        return self.S.shape[0]


@dataclass(frozen=True)
class Coefficients:
    """Derived coupling triple (Lnc, Fnc, Hnc) for one model at one squeezing."""

    Lnc: np.ndarray
    Fnc: np.ndarray
    Hnc: np.ndarray

    def __post_init__(self):
        for name in ("Lnc", "Fnc", "Hnc"):
            object.__setattr__(self, name, _frozen_matrix(getattr(self, name), name))


def derived_coefficients(model: SystemModel, params: SqueezeParams) -> Coefficients:
    """Compute the coupling triple.

    ``Lnc = ((n+1+cbar)/s) L - ((n+c)/s) L*`` and ``Fnc`` replaces the first
    weight by ``(n+cbar)/s``; their difference is ``L/s`` exactly.  ``Hnc`` is
    the Hermitian correction
    ``-(i/2)[(n+cbar)/s2 L^2 - (n+c)/s2 L*^2 + (cbar-c)/s2 L*L]``.
    """
    L = model.L
    Ld = L.conj().T
    p = params
    lnc = ((p.n + 1.0 + p.cbar) / p.s) * L - ((p.n + p.c) / p.s) * Ld
    fnc = ((p.n + p.cbar) / p.s) * L - ((p.n + p.c) / p.s) * Ld
    hnc = -0.5j * (
        ((p.n + p.cbar) / p.s2) * (L @ L)
        - ((p.n + p.c) / p.s2) * (Ld @ Ld)
        + ((p.cbar - p.c) / p.s2) * (Ld @ L)
    )
    return Coefficients(Lnc=lnc, Fnc=fnc, Hnc=hnc)


def atom_model(kappa: float, hamiltonian=None) -> SystemModel:
    """Two-level atom with decay rate kappa**2 and optional internal Hamiltonian."""
    if not (kappa > 0.0):
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    H = np.zeros((2, 2), dtype=complex) if hamiltonian is None else np.array(hamiltonian, dtype=complex)
    return SystemModel(S=np.eye(2), L=kappa * SIGMA_MINUS, H=H, label="atom")


def cavity_model(kappa: float, omega: float, levels: int) -> SystemModel:
    """Cavity mode truncated at ladder level ``levels`` (dimension levels+1).

    The lowering operator acts as ``b phi_i = sqrt(i) phi_{i-1}`` below the
    cutoff; the commutator [b, b*] equals the identity except for the
    top-level defect entry ``-levels``.  H = omega * b*b (units with hbar=1).
    """
    if not (kappa > 0.0):
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    levels = int(levels)
    if levels < 1:
        raise ValueError(f"truncation level must be >= 1, got {levels}")
    d = levels + 1
    b = np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)
    H = omega * np.diag(np.arange(d, dtype=float)).astype(complex)
    return SystemModel(S=np.eye(d), L=kappa * b, H=H, label=f"cavity(levels={levels})")


def scalar_model(value: float | complex = 1.0, h: float = 0.0) -> SystemModel:
    """One-dimensional system: L = [[value]], H = [[h]].  Useful closed forms."""
    return SystemModel(
        S=np.eye(1),
        L=np.array([[value]], dtype=complex),
        H=np.array([[h]], dtype=complex),
        label="scalar",
    )


def custom_model(S, L, H, label: str = "custom") -> SystemModel:
    return SystemModel(S=S, L=L, H=H, label=label)


def build_model(name: str, **kwargs) -> SystemModel:
    """Construct a model by name; used by the CLI config layer."""
    name = name.lower()
    zero_coupling = bool(kwargs.pop("zero_coupling", False))
    if name == "atom":
        m = atom_model(kwargs.pop("kappa", 1.0), kwargs.pop("hamiltonian", None))
    elif name == "cavity":
        m = cavity_model(
            kwargs.pop("kappa", 1.0), kwargs.pop("omega", 1.0), kwargs.pop("levels", 20)
        )
    elif name == "scalar":
        m = scalar_model(kwargs.pop("value", 1.0), kwargs.pop("h", 0.0))
    elif name == "custom":
        m = custom_model(kwargs.pop("S"), kwargs.pop("L"), kwargs.pop("H"))
    else:
        raise ValueError(f"unknown model name {name!r}")
    if kwargs:
        raise ValueError(f"unused model parameters for {name!r}: {sorted(kwargs)}")
    if zero_coupling:
        m = SystemModel(S=m.S, L=np.zeros_like(np.asarray(m.L)), H=m.H, label=m.label)
    return m


@dataclass(frozen=True)
class ModelSpec:
    """Rebuildable model description (needed to vary the cavity truncation)."""

    name: str
    options: tuple = ()

    @classmethod
    def of(cls, name: str, **options) -> "ModelSpec":
        return cls(name=name, options=tuple(sorted(options.items())))

    def build(self) -> SystemModel:
        return build_model(self.name, **dict(self.options))

    def with_option(self, key: str, value) -> "ModelSpec":
        opts = dict(self.options)
        opts[key] = value
        return ModelSpec.of(self.name, **opts)


def default_vector(model: SystemModel) -> np.ndarray:
    """Reference vector: excited state for the atom, first ladder level for the
    cavity, the unit scalar otherwise (if the dimension allows)."""
    v = np.zeros(model.d, dtype=complex)
    if model.label == "atom":
        v[0] = 1.0
    elif model.label.startswith("cavity") and model.d >= 2:
        v[1] = 1.0
    else:
        v[0] = 1.0
    return v


def resolve_vector(model: SystemModel, spec) -> np.ndarray:
    """Resolve a vector given by name ('excited', 'ground', 'fock<k>', 'unit')
    or as explicit components."""
    if spec is None or (isinstance(spec, str) and spec == "default"):
        return default_vector(model)
    if isinstance(spec, str):
        name = spec.lower()
        v = np.zeros(model.d, dtype=complex)
        if name == "excited":
            v[0] = 1.0
        elif name == "ground":
            v[-1] = 1.0
        elif name == "unit":
            v[0] = 1.0
        elif name.startswith("fock"):
            k = int(name[4:])
            if not (0 <= k < model.d):
                raise ValueError(f"fock level {k} outside dimension {model.d}")
            v[k] = 1.0
        else:
            raise ValueError(f"unknown vector name {spec!r}")
        return v
    v = np.array(spec, dtype=complex).reshape(-1)
    if v.shape[0] != model.d:
        raise ValueError(f"vector length {v.shape[0]} does not match dimension {model.d}")
    return v
