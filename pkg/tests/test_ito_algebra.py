import math

import numpy as np
import pytest

from squeezelim import ito_algebra as ia
from squeezelim.model import make_squeeze_params

SQRT2 = math.sqrt(2)


def _random_expression(rng, tags, max_len=2, n_terms=3):
    letters = ["L", "Lstar", "S", "Sstar", "H"]
    terms = {}
    for _ in range(n_terms):
        word = tuple(rng.choice(letters) for _ in range(int(rng.integers(0, max_len + 1))))
        diff = tags[int(rng.integers(0, len(tags)))]
        coeff = complex(rng.normal(), rng.normal())
        key = (word, diff)
        terms[key] = terms.get(key, 0) + coeff
    return ia.ItoExpression(terms)


def _max_term_diff(e1, e2, pt=None):
    pt = pt or ia.EvalPoint(make_squeeze_params(1.0, 0.0))
    v1 = ia.evaluate(e1, pt)
    v2 = ia.evaluate(e2, pt)
    return max(
        (abs(v1.get(k, 0j) - v2.get(k, 0j)) for k in set(v1) | set(v2)),
        default=0.0,
    )


# -- standard table ----------------------------------------------------------

def test_hp_table_entries():
    t = ia.HP_TABLE
    assert t.product("dA", "dAstar").terms == {((), "dt"): 1.0 + 0j}
    assert t.product("dA", "dLambda").terms == {((), "dA"): 1.0 + 0j}
    assert t.product("dLambda", "dAstar").terms == {((), "dAstar"): 1.0 + 0j}
    assert t.product("dLambda", "dLambda").terms == {((), "dLambda"): 1.0 + 0j}
    zero_pairs = [
        ("dAstar", "dAstar"), ("dAstar", "dA"), ("dAstar", "dLambda"),
        ("dA", "dA"), ("dLambda", "dA"),
        ("dt", "dt"), ("dt", "dA"), ("dt", "dAstar"), ("dt", "dLambda"),
        ("dA", "dt"), ("dAstar", "dt"), ("dLambda", "dt"),
    ]
    for pair in zero_pairs:
        assert t.product(*pair).is_zero()


def test_multiply_creation_pair():
    left = ia.term(1.0, ("L",), "dA")
    right = ia.term(1.0, ("Lstar",), "dAstar")
    out = ia.ito_multiply(left, right)
    assert out.terms == {(("L", "Lstar"), "dt"): 1.0 + 0j}


def test_multiply_time_annihilates():
    dt_term = ia.term(1.0, (), "dt")
    for tag in ("dt", "dA", "dAstar", "dLambda"):
        assert ia.ito_multiply(dt_term, ia.noise(tag)).is_zero()
        assert ia.ito_multiply(ia.noise(tag), dt_term).is_zero()


def test_multiply_annihilator_after_creator_vanishes():
    assert ia.ito_multiply(ia.noise("dAstar"), ia.noise("dA")).is_zero()


def test_multiply_unknown_tag_pair_raises():
    with pytest.raises(ia.ItoTableError):
        ia.ito_multiply(ia.noise("dB"), ia.noise("dBstar"))  # not an HP increment


def test_multiply_associative(rng):
    tags = ["dt", "dA", "dAstar", "dLambda", None]
    for _ in range(100):
        e1 = _random_expression(rng, tags)
        e2 = _random_expression(rng, tags)
        e3 = _random_expression(rng, tags)
        left = ia.ito_multiply(ia.ito_multiply(e1, e2), e3)
        right = ia.ito_multiply(e1, ia.ito_multiply(e2, e3))
        assert _max_term_diff(left, right) < 1e-12


# -- adjoint -----------------------------------------------------------------

def test_adjoint_basic():
    e = ia.term(1.0, ("L",), "dAstar")
    assert ia.adjoint(e).terms == {(("Lstar",), "dA"): 1.0 + 0j}


def test_adjoint_conjugates_scalars():
    e = ia.term(1j, (), "dt")
    assert ia.adjoint(e).terms == {((), "dt"): -1j}


def test_adjoint_involution(rng):
    tags = ["dt", "dA", "dAstar", "dLambda", "dB", "dBstar", "dZ", "dZstar", None]
    for _ in range(50):
        e = _random_expression(rng, tags)
        assert _max_term_diff(ia.adjoint(ia.adjoint(e)), e) < 1e-14


def test_adjoint_antihomomorphism(rng):
    tags = ["dt", "dA", "dAstar", "dLambda", None]
    for _ in range(100):
        e1 = _random_expression(rng, tags)
        e2 = _random_expression(rng, tags)
        left = ia.adjoint(ia.ito_multiply(e1, e2))
        right = ia.ito_multiply(ia.adjoint(e2), ia.adjoint(e1))
        assert _max_term_diff(left, right) < 1e-12


# -- squeezed-noise substitution --------------------------------------------

def test_substitute_reference_point():
    p = make_squeeze_params(1.0, 0.0)
    out = ia.substitute_squeezed(ia.noise("dB"), p)
    assert abs(out.terms[((), "dAstar")] - 1.0) < 1e-12
    assert abs(out.terms[((), "dA")] - SQRT2) < 1e-12

    out = ia.substitute_squeezed(ia.noise("dZ"), p)
    assert abs(out.terms[((), "dAstar")] - 1.0) < 1e-12
    assert abs(out.terms[((), "dA")] - 1.0) < 1e-12


def test_substitute_fixes_standard_increments():
    p = make_squeeze_params(2.0, 0.5)
    for tag in ("dt", "dA", "dAstar", "dLambda"):
        out = ia.substitute_squeezed(ia.noise(tag), p)
        assert out.terms == {((), tag): 1.0 + 0j}


def test_noise_table_reference_entries():
    table = ia.derive_noise_table(make_squeeze_params(1.0, math.pi / 2))
    # |n+1+c|^2 / s2 = |2+i sqrt(2)|^2 / 3 = 2
    assert abs(table[("dB", "dBstar")] - 2.0) < 1e-12
    table = ia.derive_noise_table(make_squeeze_params(1.0, 0.0))
    assert abs(table[("dZstar", "dZstar")] - 1.0) < 1e-12


def test_noise_table_all_entries_random_draws():
    worst_b, worst_z = ia._noise_table_errors(samples=100, seed=7)
    assert worst_b < 1e-10
    assert worst_z < 1e-10


def test_squeezed_table_object_matches_derivation():
    p = make_squeeze_params(3.0, -1.2)
    table = ia.squeezed_noise_table(p)
    derived = ia.derive_noise_table(p)
    for left in ("dB", "dBstar"):
        for right in ("dB", "dBstar"):
            entry = table.product(left, right).terms.get(((), "dt"), 0j)
            assert abs(complex(entry) - derived[(left, right)]) < 1e-12


# -- identity testing --------------------------------------------------------

def test_equal_within_syntactic():
    e = ia.term(2.0, ("L",), "dt")
    assert ia.equal_within(e, e, samples=3, tol=1e-12, seed=1)


def test_equal_within_squeezed_product():
    prod = ia.ito_multiply(
        ia.substitute_squeezed(ia.noise("dB"), None),
        ia.substitute_squeezed(ia.noise("dBstar"), None),
    )
    good = ia.term(lambda pt: pt.params.n + 1.0, (), "dt")
    bad = ia.term(lambda pt: pt.params.n + 0j, (), "dt")
    assert ia.equal_within(prod, good, samples=100, tol=1e-10, seed=3)
    assert not ia.equal_within(prod, bad, samples=100, tol=1e-10, seed=3)


def test_equal_within_deterministic():
    e1 = ia.substitute_squeezed(ia.noise("dZ"), None)
    e2 = ia.term(lambda pt: (pt.params.n + pt.params.c) / pt.params.s, (), "dA") + ia.term(
        lambda pt: (pt.params.n + pt.params.c) / pt.params.s, (), "dAstar"
    )
    d1 = ia.max_deviation(e1, e2, samples=20, seed=11)
    d2 = ia.max_deviation(e1, e2, samples=20, seed=11)
    assert d1 == d2 < 1e-12


# -- displayed equations -----------------------------------------------------

def test_rewrite_identity():
    rewritten = ia.substitute_squeezed(ia.squeezed_qsde(), None)
    assert ia.max_deviation(rewritten, ia.hp_qsde(), samples=100, seed=5) < 1e-10


def test_vacuum_generator_closed_form():
    left, right = ia.transfer_qsde_pair()
    derived = ia.vacuum_generator(left, right, x_name=None)
    assert ia.max_deviation(derived, ia.generator_reference(), samples=100, seed=9) < 1e-10


def test_vacuum_generator_alpha_zero_drift():
    # With a vanishing drive only the -(1/2) L*L / s2 word survives.
    left, right = ia.transfer_qsde_pair()
    derived = ia.vacuum_generator(left, right, x_name=None)
    for pt in ia.draw_points(20, seed=13):
        pt0 = ia.EvalPoint(pt.params, 0j)
        values = ia.evaluate(derived, pt0)
        expected = {(("Lstar", "L"), None): -0.5 / pt.params.s2}
        for key in set(values) | set(expected):
            assert abs(values.get(key, 0j) - expected.get(key, 0j)) < 1e-12


def test_vacuum_generator_degenerate_pair_conserves_identity():
    # Same coupling and Hamiltonian on both sides: a unitary cocycle pair,
    # whose transfer map fixes the identity.
    left = ia.displaced_qsde_star(ia.lnc_expression(), ia.sym("H"))
    right = ia.displaced_qsde(ia.lnc_expression(), ia.sym("H"))
    derived = ia.vacuum_generator(left, right, x_name=None)
    zero = ia.ItoExpression()
    assert ia.max_deviation(derived, zero, samples=50, seed=17) < 1e-12


def test_vacuum_generator_keeps_x_slot():
    left, right = ia.transfer_qsde_pair()
    poly = ia.vacuum_generator(left, right, x_name="X")
    assert poly.terms
    for (word, diff) in poly.terms:
        assert diff is None
        assert word.count("X") == 1


def test_vacuum_generator_rejects_squeezed_increments():
    with pytest.raises(ia.ItoTableError, match="substitute"):
        ia.vacuum_generator(ia.noise("dB"), ia.noise("dAstar"))


def test_weyl_qsde_is_isometric_drift():
    # d(W*W) = 0: the displacement cocycle conserves the identity.
    left = ia.adjoint(ia.weyl_qsde())
    derived = ia.vacuum_generator(left, ia.weyl_qsde(), x_name=None)
    assert ia.max_deviation(derived, ia.ItoExpression(), samples=50, seed=23) < 1e-12


def test_identity_suite_passes():
    checks = ia.identity_suite(samples=100, tol=1e-10, seed=41)
    names = [c.name for c in checks]
    assert names == ["squeezed-table", "commutative-table", "hp-rewrite", "vacuum-generator"]
    for check in checks:
        assert check.passed, f"{check.name}: {check.max_error:.3e}"


# -- housekeeping ------------------------------------------------------------

def test_expression_prunes_zeros_and_identity_letters():
    e = ia.term(0.0, ("L",), "dt") + ia.term(1.0, ("I", "L", "I"), None)
    assert e.terms == {(("L",), None): 1.0 + 0j}


def test_expression_rejects_unknown_letters_and_tags():
    with pytest.raises(ValueError):
        ia.term(1.0, ("Q",), None)
    with pytest.raises(ValueError):
        ia.term(1.0, ("L",), "dW")
