"""Noncommutative symbolic engine for single-channel quantum Ito calculus.

An :class:`ItoExpression` is a finite sum of terms ``coeff * word (x) diff``
where ``word`` is a tuple of formal system letters, ``diff`` is a process
increment tag (or ``None`` for a pure system term) and ``coeff`` is either a
complex number or a function of an :class:`EvalPoint` (squeezing parameters
plus a drive amplitude).  Words live in the free *-algebra: products
concatenate and no operator relations are applied, so every derived identity
holds for arbitrary bounded operators.

Identities are checked by polynomial identity testing: both sides are
evaluated at pseudo-random parameter draws and compared coefficient by
coefficient.  The two formal scalar letters ``Alpha``/``AlphaBar`` (the drive
amplitude and its conjugate) commute with everything, so evaluation folds
them into the numeric coefficient; stored words are never reordered.

The increment tags are ``dt``, ``dA``, ``dAstar``, ``dLambda`` for the
standard calculus, ``dB``/``dBstar`` for the squeezed noises and
``dZ``/``dZstar`` for their strong-squeezing commutative replacements.  The
product table convention is row = left factor, fixed by ``dA * dAstar = dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

import numpy as np

from .model import SqueezeParams, make_squeeze_params

__all__ = [
    "EvalPoint",
    "ItoExpression",
    "ItoTable",
    "ItoTableError",
    "IdentityCheck",
    "HP_TABLE",
    "term",
    "sym",
    "noise",
    "identity_expression",
    "ito_multiply",
    "adjoint",
    "substitute_squeezed",
    "derive_noise_table",
    "squeezed_noise_table",
    "vacuum_generator",
    "evaluate",
    "max_deviation",
    "equal_within",
    "lnc_expression",
    "fnc_expression",
    "hnc_expression",
    "squeezed_qsde",
    "hp_qsde",
    "weyl_qsde",
    "displaced_qsde",
    "displaced_qsde_star",
    "transfer_qsde_pair",
    "generator_reference",
    "identity_suite",
]

# ---------------------------------------------------------------------------
# alphabet and increments

ADJOINT_LETTER = {
    "L": "Lstar",
    "Lstar": "L",
    "S": "Sstar",
    "Sstar": "S",
    "H": "H",
    "Hnc": "Hnc",
    "Alpha": "AlphaBar",
    "AlphaBar": "Alpha",
    "X": "Xstar",
    "Xstar": "X",
}
LETTERS = frozenset(ADJOINT_LETTER)

#: letters that stand for complex scalars; they are folded into the numeric
#: coefficient when an expression is evaluated at a parameter point.
SCALAR_LETTERS = frozenset({"Alpha", "AlphaBar"})

HP_TAGS = ("dt", "dA", "dAstar", "dLambda")
SQUEEZED_TAGS = ("dB", "dBstar")
COMMUTATIVE_TAGS = ("dZ", "dZstar")
ALL_TAGS = HP_TAGS + SQUEEZED_TAGS + COMMUTATIVE_TAGS

ADJOINT_TAG = {
    None: None,
    "dt": "dt",
    "dLambda": "dLambda",
    "dA": "dAstar",
    "dAstar": "dA",
    "dB": "dBstar",
    "dBstar": "dB",
    "dZ": "dZstar",
    "dZstar": "dZ",
}


class ItoTableError(ValueError):
    """A differential product was requested that the table does not define."""


@dataclass(frozen=True)
class EvalPoint:
    """One numeric parameter draw: squeezing parameters plus drive amplitude."""

    params: SqueezeParams
    alpha: complex = 0j


Coefficient = Union[complex, Callable[[EvalPoint], complex]]


def _as_coeff(value) -> Coefficient:
    if callable(value):
        return value
    return complex(value)


def _cval(c: Coefficient, pt: EvalPoint) -> complex:
    return complex(c(pt)) if callable(c) else c


def _cadd(c1: Coefficient, c2: Coefficient) -> Coefficient:
    if callable(c1) or callable(c2):
        return lambda pt, a=c1, b=c2: _cval(a, pt) + _cval(b, pt)
    return c1 + c2


def _cmul(c1: Coefficient, c2: Coefficient) -> Coefficient:
    if callable(c1) or callable(c2):
        return lambda pt, a=c1, b=c2: _cval(a, pt) * _cval(b, pt)
    return c1 * c2


def _cneg(c: Coefficient) -> Coefficient:
    if callable(c):
        return lambda pt, a=c: -_cval(a, pt)
    return -c


def _cconj(c: Coefficient) -> Coefficient:
    if callable(c):
        return lambda pt, a=c: _cval(a, pt).conjugate()
    return c.conjugate()


def _normalize_word(word) -> tuple:
    if isinstance(word, str):
        word = (word,)
    letters = []
    for letter in word:
        if letter == "I":
            continue  # identity is the empty word
        if letter not in LETTERS:
            raise ValueError(f"unknown system letter {letter!r}")
        letters.append(letter)
    return tuple(letters)


def _check_tag(diff):
    if diff is not None and diff not in ALL_TAGS:
        raise ValueError(f"unknown differential tag {diff!r}")
    return diff


# ---------------------------------------------------------------------------
# expressions


class ItoExpression:
    """Normal-form sum of ``coeff * word (x) diff`` terms.

    Terms are keyed by (word, diff); exact numeric zeros are pruned.  The
    instance is treated as immutable: do not mutate ``terms``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean: dict = {}
        for key, coeff in (terms or {}).items():
            word, diff = key
            word = _normalize_word(word)
            diff = _check_tag(diff)
            coeff = _as_coeff(coeff)
            k = (word, diff)
            if k in clean:
                coeff = _cadd(clean[k], coeff)
            if not callable(coeff) and coeff == 0:
                clean.pop(k, None)
                continue
            clean[k] = coeff
        self.terms = clean

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "ItoExpression") -> "ItoExpression":
        acc = dict(self.terms)
        merged = dict(acc)
        for key, coeff in other.terms.items():
            merged[key] = _cadd(merged[key], coeff) if key in merged else coeff
        return ItoExpression(merged)

    def __sub__(self, other: "ItoExpression") -> "ItoExpression":
        return self + (-other)

    def __neg__(self) -> "ItoExpression":
        return ItoExpression({k: _cneg(c) for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, ItoExpression):
            return ito_multiply(self, other)
        return self.scaled(other)

    def __rmul__(self, other):
        return self.scaled(other)

    def scaled(self, factor: Coefficient) -> "ItoExpression":
        factor = _as_coeff(factor)
        return ItoExpression({k: _cmul(factor, c) for k, c in self.terms.items()})

    def adjoint(self) -> "ItoExpression":
        return adjoint(self)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, word, diff=None) -> Coefficient:
        return self.terms.get((_normalize_word(word), diff), 0j)

    def __repr__(self):
        if not self.terms:
            return "ItoExpression(0)"
        parts = []
        for (word, diff), coeff in self.terms.items():
            w = "*".join(word) if word else "I"
            d = f" (x) {diff}" if diff else ""
            c = "f(.)" if callable(coeff) else f"{coeff:.6g}"
            parts.append(f"({c})*{w}{d}")
        return "ItoExpression(" + " + ".join(parts) + ")"


def term(coeff: Coefficient, word=(), diff=None) -> ItoExpression:
    """Single-term expression."""
    return ItoExpression({(_normalize_word(word), diff): coeff})


def sym(*letters: str) -> ItoExpression:
    """Pure system word with unit coefficient."""
    return term(1.0 + 0j, letters)


def noise(tag: str) -> ItoExpression:
    """Bare increment with unit coefficient and empty word."""
    return term(1.0 + 0j, (), tag)


def identity_expression() -> ItoExpression:
    return term(1.0 + 0j, ())


# ---------------------------------------------------------------------------
# tables and multiplication


class ItoTable:
    """Product rules (left tag, right tag) -> ItoExpression (possibly zero)."""

    def __init__(self, name: str, products: Mapping):
        self.name = name
        self.products = dict(products)

    def product(self, left: str, right: str) -> ItoExpression:
        try:
            return self.products[(left, right)]
        except KeyError:
            raise ItoTableError(
                f"table {self.name!r} has no product rule for ({left}, {right})"
            ) from None


def _build_hp_table() -> ItoTable:
    zero = ItoExpression()
    products = {(l, r): zero for l in HP_TAGS for r in HP_TAGS}
    products[("dA", "dAstar")] = noise("dt")
    products[("dA", "dLambda")] = noise("dA")
    products[("dLambda", "dAstar")] = noise("dAstar")
    products[("dLambda", "dLambda")] = noise("dLambda")
    return ItoTable("hp", products)


HP_TABLE = _build_hp_table()


def squeezed_noise_table(params: SqueezeParams | None = None) -> ItoTable:
    """Closed-form product table for {dt, dB, dBstar}.

    Entries are the correlation constants: dB*dBstar = (n+1) dt,
    dBstar*dB = n dt, dB*dB = c dt, dBstar*dBstar = cbar dt.  With
    ``params=None`` the entries stay parameterized.
    """

    def k(f):
        if params is None:
            return f
        return f(EvalPoint(params))

    tags = ("dt",) + SQUEEZED_TAGS
    zero = ItoExpression()
    products = {(l, r): zero for l in tags for r in tags}
    products[("dB", "dBstar")] = term(k(lambda pt: pt.params.n + 1.0), (), "dt")
    products[("dBstar", "dB")] = term(k(lambda pt: pt.params.n + 0j), (), "dt")
    products[("dB", "dB")] = term(k(lambda pt: pt.params.c), (), "dt")
    products[("dBstar", "dBstar")] = term(k(lambda pt: pt.params.cbar), (), "dt")
    return ItoTable("squeezed", products)


def ito_multiply(e1: ItoExpression, e2: ItoExpression, table: ItoTable = HP_TABLE) -> ItoExpression:
    """Bilinear product: words concatenate, increment pairs reduce via the table.

    A ``None`` increment acts as the unit in the differential slot (system
    factors commute with increments of the other tensor leg).
    """
    acc: dict = {}

    def add(key, coeff):
        acc[key] = _cadd(acc[key], coeff) if key in acc else coeff

    for (w1, d1), c1 in e1.terms.items():
        for (w2, d2), c2 in e2.terms.items():
            c = _cmul(c1, c2)
            word = w1 + w2
            if d1 is None:
                add((word, d2), c)
            elif d2 is None:
                add((word, d1), c)
            else:
                for (wp, dp), cp in table.product(d1, d2).terms.items():
                    add((word + wp, dp), _cmul(c, cp))
    return ItoExpression(acc)


def adjoint(e: ItoExpression) -> ItoExpression:
    """Antilinear involution: reverse words, pair letters, flip increments."""
    out: dict = {}
    for (word, diff), coeff in e.terms.items():
        new_word = tuple(ADJOINT_LETTER[letter] for letter in reversed(word))
        key = (new_word, ADJOINT_TAG[diff])
        c = _cconj(coeff)
        out[key] = _cadd(out[key], c) if key in out else c
    return ItoExpression(out)


# ---------------------------------------------------------------------------
# squeezed-noise substitution

def _expansion_coeffs(p: SqueezeParams | None):
    """Expansion of dB/dBstar/dZ/dZstar in dA, dAstar.

    With ``p=None`` the weights stay parameterized (evaluated per draw).
    """

    def k(f):
        if p is None:
            return f
        return f(EvalPoint(p))

    return {
        "dB": {
            "dAstar": k(lambda pt: (pt.params.n + pt.params.c) / pt.params.s),
            "dA": k(lambda pt: (pt.params.n + 1.0 + pt.params.c) / pt.params.s),
        },
        "dBstar": {
            "dA": k(lambda pt: (pt.params.n + pt.params.cbar) / pt.params.s),
            "dAstar": k(lambda pt: (pt.params.n + 1.0 + pt.params.cbar) / pt.params.s),
        },
        "dZ": {
            "dAstar": k(lambda pt: (pt.params.n + pt.params.c) / pt.params.s),
            "dA": k(lambda pt: (pt.params.n + pt.params.c) / pt.params.s),
        },
        "dZstar": {
            "dA": k(lambda pt: (pt.params.n + pt.params.cbar) / pt.params.s),
            "dAstar": k(lambda pt: (pt.params.n + pt.params.cbar) / pt.params.s),
        },
    }


def substitute_squeezed(e: ItoExpression, p: SqueezeParams | None) -> ItoExpression:
    """Replace every dB/dBstar/dZ/dZstar increment by its dA/dAstar combination.

    With a concrete ``p`` the weights are numeric; with ``p=None`` they stay
    parameterized for identity testing across draws.
    """
    expansion = _expansion_coeffs(p)
    acc: dict = {}

    def add(key, coeff):
        acc[key] = _cadd(acc[key], coeff) if key in acc else coeff

    for (word, diff), coeff in e.terms.items():
        if diff in expansion:
            for new_diff, weight in expansion[diff].items():
                add((word, new_diff), _cmul(coeff, weight))
        else:
            add((word, diff), coeff)
    return ItoExpression(acc)


def derive_noise_table(p: SqueezeParams) -> dict:
    """Derive the dt coefficients of all products within {dB, dBstar} and
    {dZ, dZstar} by substitution followed by the standard table."""
    out = {}
    for family in (SQUEEZED_TAGS, COMMUTATIVE_TAGS):
        for left in family:
            for right in family:
                prod = ito_multiply(
                    substitute_squeezed(noise(left), p),
                    substitute_squeezed(noise(right), p),
                )
                out[(left, right)] = complex(prod.terms.get(((), "dt"), 0j))
    return out


# ---------------------------------------------------------------------------
# vacuum generator

def vacuum_generator(qsde_left: ItoExpression, qsde_right: ItoExpression,
                     x_name: str | None = "X") -> ItoExpression:
    """Vacuum dt-coefficient of d(V* X U) for the left/right QSDE coefficients.

    ``qsde_left`` holds the coefficients standing to the right of V* in the
    adjoint equation, ``qsde_right`` those standing to the left of U.  Under
    the vacuum state every stochastic integral vanishes, so only three pieces
    survive: (left dt-part) X + X (right dt-part) + (left dA-part) X (right
    dAstar-part).  With ``x_name=None`` the slot is specialized to the
    identity.
    """
    for name, e in (("left", qsde_left), ("right", qsde_right)):
        for (_, diff) in e.terms:
            if diff not in HP_TAGS:
                raise ItoTableError(
                    f"{name} QSDE carries non-standard increment {diff!r}; "
                    "substitute squeezed noises first"
                )
    xw = (x_name,) if x_name else ()
    acc: dict = {}

    def add(key, coeff):
        acc[key] = _cadd(acc[key], coeff) if key in acc else coeff

    for (w, diff), c in qsde_left.terms.items():
        if diff == "dt":
            add((w + xw, None), c)
    for (w, diff), c in qsde_right.terms.items():
        if diff == "dt":
            add((xw + w, None), c)
    for (w1, d1), c1 in qsde_left.terms.items():
        if d1 != "dA":
            continue
        for (w2, d2), c2 in qsde_right.terms.items():
            if d2 != "dAstar":
                continue
            add((w1 + xw + w2, None), _cmul(c1, c2))
    return ItoExpression(acc)


# ---------------------------------------------------------------------------
# evaluation and identity testing

def evaluate(e: ItoExpression, pt: EvalPoint) -> dict:
    """Numeric coefficients keyed by (core word, diff) at one parameter draw.

    Scalar letters are folded into the coefficient; all other letters keep
    their order.
    """
    out: dict = {}
    for (word, diff), coeff in e.terms.items():
        z = _cval(coeff, pt)
        core = []
        for letter in word:
            if letter == "Alpha":
                z *= pt.alpha
            elif letter == "AlphaBar":
                z *= pt.alpha.conjugate()
            else:
                core.append(letter)
        key = (tuple(core), diff)
        out[key] = out.get(key, 0j) + z
    return out


def draw_points(samples: int, seed: int) -> list:
    """Deterministic pseudo-random draws: n log-uniform in [0.1, 1e3], theta
    uniform away from +-pi, alpha uniform in the complex square [-2, 2]^2."""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(samples):
        n = 10.0 ** rng.uniform(-1.0, 3.0)
        theta = rng.uniform(-math.pi + 0.1, math.pi - 0.1)
        alpha = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        points.append(EvalPoint(make_squeeze_params(n, theta), alpha))
    return points


def max_deviation(e1: ItoExpression, e2: ItoExpression, samples: int = 100,
                  seed: int = 0) -> float:
    """Largest coefficient difference between two expressions over draws."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    worst = 0.0
    for pt in draw_points(samples, seed):
        v1 = evaluate(e1, pt)
        v2 = evaluate(e2, pt)
        for key in set(v1) | set(v2):
            worst = max(worst, abs(v1.get(key, 0j) - v2.get(key, 0j)))
    return worst


def equal_within(e1: ItoExpression, e2: ItoExpression, samples: int = 100,
                 tol: float = 1e-10, seed: int = 0) -> bool:
    """Coefficient-wise equality at ``samples`` pseudo-random parameter draws."""
    return max_deviation(e1, e2, samples=samples, seed=seed) < tol


# ---------------------------------------------------------------------------
# displayed equations as expression builders
#
# All weights are parameterized closures of the evaluation point, so a single
# construction serves both identity testing (random draws) and the numeric
# superoperator assembly (one concrete point).

def _w(f) -> Coefficient:
    return f


def lnc_expression() -> ItoExpression:
    """Exact coupling: ((n+1+cbar)/s) L - ((n+c)/s) L*."""
    return ItoExpression({
        (("L",), None): _w(lambda pt: (pt.params.n + 1.0 + pt.params.cbar) / pt.params.s),
        (("Lstar",), None): _w(lambda pt: -(pt.params.n + pt.params.c) / pt.params.s),
    })


def fnc_expression() -> ItoExpression:
    """Commutative-limit coupling: ((n+cbar)/s) L - ((n+c)/s) L* (skew-adjoint)."""
    return ItoExpression({
        (("L",), None): _w(lambda pt: (pt.params.n + pt.params.cbar) / pt.params.s),
        (("Lstar",), None): _w(lambda pt: -(pt.params.n + pt.params.c) / pt.params.s),
    })


def hnc_expression() -> ItoExpression:
    """Correction Hamiltonian -(i/2)[(n+cbar)/s2 LL - (n+c)/s2 L*L* + (cbar-c)/s2 L*L]."""
    return ItoExpression({
        (("L", "L"), None): _w(lambda pt: -0.5j * (pt.params.n + pt.params.cbar) / pt.params.s2),
        (("Lstar", "Lstar"), None): _w(lambda pt: 0.5j * (pt.params.n + pt.params.c) / pt.params.s2),
        (("Lstar", "L"), None): _w(lambda pt: -0.5j * (pt.params.cbar - pt.params.c) / pt.params.s2),
    })


def _attach(e: ItoExpression, tag: str) -> ItoExpression:
    """Tag a pure system expression with one increment."""
    out = {}
    for (word, diff), coeff in e.terms.items():
        if diff is not None:
            raise ValueError("expression already carries increments")
        out[(word, tag)] = coeff
    return ItoExpression(out)


def squeezed_qsde() -> ItoExpression:
    """Unitary QSDE written in the squeezed noises:

    L dBstar - L* dB + (1/2)(LL cbar - LL* n - L*L (n+1) + L*L* c) dt - iH dt.
    """
    return ItoExpression({
        (("L",), "dBstar"): 1.0,
        (("Lstar",), "dB"): -1.0,
        (("L", "L"), "dt"): _w(lambda pt: 0.5 * pt.params.cbar),
        (("L", "Lstar"), "dt"): _w(lambda pt: -0.5 * pt.params.n + 0j),
        (("Lstar", "L"), "dt"): _w(lambda pt: -0.5 * (pt.params.n + 1.0) + 0j),
        (("Lstar", "Lstar"), "dt"): _w(lambda pt: 0.5 * pt.params.c),
        (("H",), "dt"): -1j,
    })


def hp_qsde() -> ItoExpression:
    """Same cocycle in the standard noises: Lnc dAstar - Lnc* dA - (1/2)Lnc*Lnc dt - iH dt."""
    lnc = lnc_expression()
    lnc_star = adjoint(lnc)
    drift = (-0.5) * (lnc_star * lnc)
    return (
        _attach(lnc, "dAstar")
        + _attach((-1.0) * lnc_star, "dA")
        + _attach(drift + (-1j) * sym("H"), "dt")
    )


def weyl_qsde() -> ItoExpression:
    """Displacement cocycle: alpha dAstar - alphabar dA - (1/2)|alpha|^2 dt."""
    return ItoExpression({
        (("Alpha",), "dAstar"): 1.0,
        (("AlphaBar",), "dA"): -1.0,
        (("AlphaBar", "Alpha"), "dt"): -0.5,
    })


def displaced_qsde(coupling: ItoExpression, hamiltonian: ItoExpression) -> ItoExpression:
    """Forward equation of a unitary cocycle composed with the displacement:

    (S-I) dLambda + (C+a) dAstar - (C+a)* S dA
    + [ -(1/2)(C+a)*(C+a) + (1/2)(abar C - a C*) - i Hm ] dt,

    with C the coupling, a the formal drive amplitude and Hm the Hamiltonian.
    """
    a = sym("Alpha")
    abar = sym("AlphaBar")
    cpa = coupling + a
    cpa_star = adjoint(cpa)
    drift = (
        (-0.5) * (cpa_star * cpa)
        + 0.5 * (abar * coupling - a * adjoint(coupling))
        + (-1j) * hamiltonian
    )
    return (
        _attach(sym("S") - identity_expression(), "dLambda")
        + _attach(cpa, "dAstar")
        + _attach((-1.0) * (cpa_star * sym("S")), "dA")
        + _attach(drift, "dt")
    )


def displaced_qsde_star(coupling: ItoExpression, hamiltonian: ItoExpression) -> ItoExpression:
    """Adjoint-side equation (coefficients standing to the right of V*):

    (S*-I) dLambda + (C+a)* dA - S*(C+a) dAstar
    + [ -(1/2)(C+a)*(C+a) - (1/2)(abar C - a C*) + i Hm ] dt.
    """
    a = sym("Alpha")
    abar = sym("AlphaBar")
    cpa = coupling + a
    cpa_star = adjoint(cpa)
    drift = (
        (-0.5) * (cpa_star * cpa)
        + (-0.5) * (abar * coupling - a * adjoint(coupling))
        + 1j * hamiltonian
    )
    return (
        _attach(sym("Sstar") - identity_expression(), "dLambda")
        + _attach(cpa_star, "dA")
        + _attach((-1.0) * (sym("Sstar") * cpa), "dAstar")
        + _attach(drift, "dt")
    )


def transfer_qsde_pair() -> tuple:
    """The displaced equation pair whose vacuum reduction generates the
    transfer semigroup: adjoint side with the replaced coupling and the
    corrected Hamiltonian, forward side with the exact coupling."""
    left = displaced_qsde_star(fnc_expression(), sym("H") + hnc_expression())
    right = displaced_qsde(lnc_expression(), sym("H"))
    return left, right


def generator_reference() -> ItoExpression:
    """Closed form of the vacuum generator at the identity:

    -(1/2) L*L / s2 + (abar L - a L*) / s.
    """
    return ItoExpression({
        (("Lstar", "L"), None): _w(lambda pt: -0.5 / pt.params.s2 + 0j),
        (("AlphaBar", "L"), None): _w(lambda pt: 1.0 / pt.params.s + 0j),
        (("Alpha", "Lstar"), None): _w(lambda pt: -1.0 / pt.params.s + 0j),
    })


# ---------------------------------------------------------------------------
# identity suite

@dataclass(frozen=True)
class IdentityCheck:
    name: str
    detail: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance


def _noise_table_errors(samples: int, seed: int) -> tuple:
    worst_b = 0.0
    worst_z = 0.0
    for pt in draw_points(samples, seed):
        p = pt.params
        table = derive_noise_table(p)
        expected_b = {
            ("dB", "dBstar"): p.n + 1.0,
            ("dBstar", "dB"): p.n + 0j,
            ("dB", "dB"): p.c,
            ("dBstar", "dBstar"): p.cbar,
        }
        expected_z = {
            ("dZ", "dZstar"): p.n + 0j,
            ("dZstar", "dZ"): p.n + 0j,
            ("dZ", "dZ"): p.c - (p.n + p.c) / p.s2,
            ("dZstar", "dZstar"): p.cbar - (p.n + p.cbar) / p.s2,
        }
        for key, value in expected_b.items():
            worst_b = max(worst_b, abs(table[key] - value))
        for key, value in expected_z.items():
            worst_z = max(worst_z, abs(table[key] - value))
    return worst_b, worst_z


def identity_suite(samples: int = 100, tol: float = 1e-10, seed: int = 2026) -> list:
    """Re-derive every displayed algebraic identity and report the worst
    coefficient error of each, over ``samples`` parameter draws."""
    err_b, err_z = _noise_table_errors(samples, seed)
    checks = [
        IdentityCheck(
            "squeezed-table",
            "dB/dBstar products against the closed-form correlation table",
            err_b,
            tol,
        ),
        IdentityCheck(
            "commutative-table",
            "dZ/dZstar products against the closed-form correlation table",
            err_z,
            tol,
        ),
    ]
    rewrite_err = max_deviation(
        substitute_squeezed(squeezed_qsde(), None), hp_qsde(), samples, seed + 1
    )
    checks.append(
        IdentityCheck(
            "hp-rewrite",
            "squeezed-noise QSDE rewritten in dA/dAstar against the direct form",
            rewrite_err,
            tol,
        )
    )
    left, right = transfer_qsde_pair()
    gen_err = max_deviation(
        vacuum_generator(left, right, x_name=None), generator_reference(), samples, seed + 2
    )
    checks.append(
        IdentityCheck(
            "vacuum-generator",
            "mechanically reduced vacuum generator at the identity against its closed form",
            gen_err,
            tol,
        )
    )
    return checks
