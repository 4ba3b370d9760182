import math

import numpy as np
import pytest

from squeezelim import ito_algebra as ia
from squeezelim.model import (
    atom_model,
    custom_model,
    derived_coefficients,
    make_squeeze_params,
    scalar_model,
)
from squeezelim.numkernel import dagger, expm, opnorm, unvec, vec
from squeezelim.semigroup import (
    StepFunction,
    assemble_superoperator,
    build_transfer_generator,
    error_norm_squared,
    resolve_step_function,
    sup_deviation,
    transfer_apply,
    transfer_composition,
)

from conftest import random_complex_matrix, random_hermitian, random_unitary, random_unit_vector

SQRT2 = math.sqrt(2)
SCALAR_RATE = -0.5 * (SQRT2 - 1.0) ** 2  # closed form for d=1, L=1, n=1, theta=0


def _reference_params():
    return make_squeeze_params(1.0, 0.0)


def test_scalar_generator_closed_form():
    gen = build_transfer_generator(scalar_model(1.0), _reference_params(), 0j)
    assert gen.matrix.shape == (1, 1)
    assert abs(gen.matrix[0, 0] - SCALAR_RATE) < 1e-14


def test_generator_identity_matches_drift(rng):
    # alpha = 0: the action on the identity is -(1/2) L*L / s2.
    for _ in range(20):
        d = int(rng.integers(1, 5))
        L = random_complex_matrix(d, rng)
        m = custom_model(np.eye(d), L, random_hermitian(d, rng))
        p = make_squeeze_params(10.0 ** rng.uniform(-1, 2), rng.uniform(-2.9, 2.9))
        gen = build_transfer_generator(m, p, 0j)
        expected = -0.5 * dagger(L) @ L / p.s2
        assert np.max(np.abs(gen.at_identity() - expected)) < 1e-10


def test_generator_scattering_invariance(rng):
    # The vacuum reduction drops every term carrying the scattering matrix.
    base = atom_model(1.3, random_hermitian(2, rng))
    p = make_squeeze_params(3.0, 1.1)
    alpha = 0.8 - 0.4j
    g0 = build_transfer_generator(base, p, alpha).matrix
    for _ in range(20):
        m = custom_model(random_unitary(2, rng), base.L, base.H)
        g = build_transfer_generator(m, p, alpha).matrix
        assert np.max(np.abs(g - g0)) < 1e-10


def test_generator_degenerate_pair_fixes_identity():
    # Replacing the adjoint-side coupling by the exact one and dropping the
    # correction Hamiltonian yields a unitary pair: G(I) = 0.
    left = ia.displaced_qsde_star(ia.lnc_expression(), ia.sym("H"))
    right = ia.displaced_qsde(ia.lnc_expression(), ia.sym("H"))
    poly = ia.vacuum_generator(left, right, x_name="X")
    m = atom_model(1.0)
    p = make_squeeze_params(2.0, 0.4)
    g = assemble_superoperator(poly, m, p, 0.5 + 0.2j)
    gi = unvec(g @ vec(np.eye(2)), 2)
    assert np.max(np.abs(gi)) < 1e-12


def test_error_zero_coupling():
    m = custom_model(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)))
    f = StepFunction.from_segments([(0.5, 1.0 + 1.0j), (0.5, -0.3j)])
    e = error_norm_squared(m, make_squeeze_params(5.0, 1.0), f, [1.0, 0.0])
    assert abs(e) < 1e-12


def test_error_scalar_closed_form():
    e = error_norm_squared(scalar_model(1.0), _reference_params(), StepFunction.zero(1.0), [1.0])
    expected = 2.0 - 2.0 * math.exp(SCALAR_RATE)
    assert abs(e - expected) < 1e-10


def test_error_requires_normalized_vector():
    m = scalar_model(1.0)
    with pytest.raises(ValueError, match="normalized"):
        error_norm_squared(m, _reference_params(), StepFunction.zero(1.0), [2.0])
    e = error_norm_squared(
        m, _reference_params(), StepFunction.zero(1.0), [2.0], allow_unnormalized=True
    )
    assert e > 0


def test_error_bounds_random(rng):
    m = atom_model(1.0)
    for _ in range(20):
        p = make_squeeze_params(10.0 ** rng.uniform(-1, 2), rng.uniform(-2.9, 2.9))
        f = StepFunction.from_segments([(rng.uniform(0.1, 1.0), complex(rng.normal(), rng.normal()))])
        e = error_norm_squared(m, p, f, random_unit_vector(2, rng))
        assert -1e-9 <= e <= 4.0 + 1e-9


def test_segment_order_matters_and_is_first_outermost():
    # Two very different segment amplitudes: composing in the wrong order
    # gives a different evolved identity.
    m = atom_model(1.0)
    p = make_squeeze_params(1.0, 0.7)
    f12 = StepFunction.from_segments([(0.4, 2.0), (0.6, -1.0j)])
    f21 = StepFunction.from_segments([(0.6, -1.0j), (0.4, 2.0)])
    m12 = transfer_composition(m, p, f12).evolved_identity()
    m21 = transfer_composition(m, p, f21).evolved_identity()
    assert np.max(np.abs(m12 - m21)) > 1e-4
    # first segment outermost: T_{d1,a1}(T_{d2,a2}(I))
    g1 = build_transfer_generator(m, p, 2.0).matrix
    g2 = build_transfer_generator(m, p, -1.0j).matrix
    direct = unvec(expm(0.4 * g1, 1e-13) @ expm(0.6 * g2, 1e-13) @ vec(np.eye(2)), 2)
    assert np.max(np.abs(m12 - direct)) < 1e-12


def test_contractivity(rng):
    m = atom_model(1.0)
    p = make_squeeze_params(2.0, -0.8)
    gen = build_transfer_generator(m, p, 0.4 + 0.1j)
    for _ in range(50):
        x = random_complex_matrix(2, rng)
        x = x / opnorm(x)
        t = rng.uniform(0.0, 2.0)
        assert opnorm(transfer_apply(gen, x, t)) <= 1.0 + 1e-9


def test_semigroup_law(rng):
    m = atom_model(1.0)
    p = make_squeeze_params(1.5, 0.9)
    gen = build_transfer_generator(m, p, -0.2 + 0.7j)
    for _ in range(20):
        x = random_complex_matrix(2, rng)
        t, s = rng.uniform(0.05, 1.0, size=2)
        once = transfer_apply(gen, x, t + s)
        twice = transfer_apply(gen, transfer_apply(gen, x, s), t)
        assert np.max(np.abs(once - twice)) < 1e-9


def test_adjoint_generator_evolution_matches_adjoint():
    # Evolving under the transpose-conjugated superoperator reproduces the
    # adjoint of the evolved identity.
    m = atom_model(1.0, np.diag([0.3, -0.3]).astype(complex))
    p = make_squeeze_params(2.0, 1.3)
    f = StepFunction.from_segments([(0.5, 0.6 - 0.2j), (0.5, -0.1 + 0.4j)])
    comp = transfer_composition(m, p, f)
    evolved = comp.evolved_identity()
    d = m.d
    # vec(M^dagger) = P conj(vec(M)) with P the transpose permutation
    perm = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            perm[i * d + j, j * d + i] = 1.0
    adj_matrix = perm @ comp.matrix.conj() @ perm
    evolved_adj = unvec(adj_matrix @ vec(np.eye(d)), d)
    assert np.max(np.abs(evolved_adj - dagger(evolved))) < 1e-9


def test_sup_deviation_zero_coupling():
    m = custom_model(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)))
    assert sup_deviation(m, make_squeeze_params(1.0, 0.0), 1.0, 1.0, 11) == 0.0


def test_sup_deviation_scalar_closed_form():
    dev = sup_deviation(scalar_model(1.0), _reference_params(), 0j, 1.0, 101)
    assert abs(dev - abs(math.exp(SCALAR_RATE) - 1.0)) < 1e-9


def test_sup_deviation_decreases_with_strength():
    m = atom_model(1.0)
    devs = [
        sup_deviation(m, make_squeeze_params(n, 0.0), 0j, 1.0, 51)
        for n in (1.0, 10.0, 100.0)
    ]
    assert devs[0] > devs[1] > devs[2]


def test_step_function_validation():
    with pytest.raises(ValueError):
        StepFunction.from_segments([(0.0, 1.0)])
    with pytest.raises(ValueError):
        StepFunction.from_segments([(-1.0, 1.0)])
    f = StepFunction.from_segments([(0.25, 1.0), (0.75, 2.0)])
    assert f.total_time == pytest.approx(1.0)
    assert StepFunction.zero(2.0).segments == ((2.0, 0j),)


def test_resolve_step_function():
    assert resolve_step_function(None, 1.5).segments == ((1.5, 0j),)
    assert resolve_step_function(StepFunction(()), 2.0).segments == ((2.0, 0j),)
    assert resolve_step_function([(1.0, 1j)]).segments == ((1.0, 1j),)
    with pytest.raises(ValueError, match="total time"):
        resolve_step_function([(1.0, 0j)], 2.0)
