import math

import numpy as np
import pytest

from squeezelim.model import (
    DegeneratePhaseError,
    atom_model,
    cavity_model,
    custom_model,
    derived_coefficients,
    make_squeeze_params,
    scalar_model,
    SIGMA_MINUS,
    SIGMA_PLUS,
)

from conftest import random_complex_matrix, random_unitary


def test_params_at_zero_phase():
    p = make_squeeze_params(1.0, 0.0)
    assert p.c == pytest.approx(math.sqrt(2))
    assert p.a == pytest.approx(math.sqrt(2))
    assert p.s2 == pytest.approx(3 + 2 * math.sqrt(2))
    assert p.s == pytest.approx(1 + math.sqrt(2))


def test_params_at_quarter_phase():
    p = make_squeeze_params(1.0, math.pi / 2)
    assert p.c == pytest.approx(1j * math.sqrt(2))
    assert p.a == pytest.approx(0.0, abs=1e-15)
    assert p.s2 == pytest.approx(3.0)


def test_params_reject_bad_inputs():
    with pytest.raises(ValueError):
        make_squeeze_params(0.0, 0.0)
    with pytest.raises(ValueError):
        make_squeeze_params(-1.0, 0.0)
    with pytest.raises(DegeneratePhaseError, match="degenerate squeezing phase"):
        make_squeeze_params(1.0, math.pi)
    with pytest.raises(DegeneratePhaseError, match="degenerate squeezing phase"):
        make_squeeze_params(1.0, -math.pi)
    with pytest.raises(DegeneratePhaseError):
        make_squeeze_params(1.0, 4.0)


def test_correlation_modulus(rng):
    for _ in range(1000):
        n = 10.0 ** rng.uniform(-1, 3)
        theta = rng.uniform(-math.pi + 0.1, math.pi - 0.1)
        p = make_squeeze_params(n, theta)
        assert abs(abs(p.c) ** 2 - n * (n + 1)) < 1e-12 * max(1.0, n * (n + 1))
        assert p.s2 > 0


def test_weight_identities(rng):
    # |n+1+c|^2 = (n+1) s2 and |n+c|^2 = n s2: exactly what makes the noise
    # correlation table close.
    for _ in range(1000):
        n = 10.0 ** rng.uniform(-1, 3)
        theta = rng.uniform(-math.pi + 0.1, math.pi - 0.1)
        p = make_squeeze_params(n, theta)
        scale = max(1.0, (n + 1) * p.s2)
        assert abs(abs(n + 1 + p.c) ** 2 - (n + 1) * p.s2) < 1e-10 * scale
        assert abs(abs(n + p.c) ** 2 - n * p.s2) < 1e-10 * scale


def test_atom_coefficients_zero_phase():
    m = atom_model(1.0)
    p = make_squeeze_params(1.0, 0.0)
    co = derived_coefficients(m, p)
    np.testing.assert_allclose(co.Lnc, math.sqrt(2) * SIGMA_MINUS - SIGMA_PLUS, atol=1e-14)
    np.testing.assert_allclose(co.Fnc, SIGMA_MINUS - SIGMA_PLUS, atol=1e-14)
    np.testing.assert_allclose(co.Hnc, np.zeros((2, 2)), atol=1e-14)


def test_atom_correction_hamiltonian_quarter_phase():
    m = atom_model(1.0)
    p = make_squeeze_params(1.0, math.pi / 2)
    co = derived_coefficients(m, p)
    expected = -(math.sqrt(2) / 3) * (SIGMA_PLUS @ SIGMA_MINUS)
    np.testing.assert_allclose(co.Hnc, expected, atol=1e-14)


def test_zero_coupling_gives_zero_coefficients():
    m = custom_model(np.eye(3), np.zeros((3, 3)), np.zeros((3, 3)))
    co = derived_coefficients(m, make_squeeze_params(2.0, 0.3))
    for mat in (co.Lnc, co.Fnc, co.Hnc):
        np.testing.assert_allclose(mat, np.zeros((3, 3)))


def test_coefficient_invariants_random(rng):
    for _ in range(200):
        d = int(rng.integers(1, 5))
        L = random_complex_matrix(d, rng)
        m = custom_model(np.eye(d), L, np.zeros((d, d)))
        n = 10.0 ** rng.uniform(-1, 3)
        theta = rng.uniform(-math.pi + 0.1, math.pi - 0.1)
        p = make_squeeze_params(n, theta)
        co = derived_coefficients(m, p)
        assert np.max(np.abs(co.Fnc.conj().T + co.Fnc)) < 1e-12
        assert np.max(np.abs(co.Hnc.conj().T - co.Hnc)) < 1e-12
        assert np.max(np.abs(co.Lnc - co.Fnc - L / p.s)) < 1e-12


def test_coupling_difference_shrinks_with_strength():
    m = atom_model(1.0)
    for theta in (0.0, math.pi / 2, -math.pi / 2, 3.0):
        norms = []
        for k in range(5):
            p = make_squeeze_params(10.0 ** k, theta)
            co = derived_coefficients(m, p)
            norms.append(np.linalg.norm(co.Lnc - co.Fnc, 2))
        assert all(b < a for a, b in zip(norms, norms[1:]))


def test_atom_model_matrices():
    m = atom_model(1.0)
    np.testing.assert_allclose(m.L, SIGMA_MINUS)
    np.testing.assert_allclose(atom_model(2.0).L, 2 * SIGMA_MINUS)
    with pytest.raises(ValueError):
        atom_model(0.0)


def test_cavity_ladder_matrix():
    m = cavity_model(1.0, 1.0, 2)
    b = np.asarray(m.L)
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 1] = 1.0
    expected[1, 2] = math.sqrt(2)
    np.testing.assert_allclose(b, expected)
    # levels=1 reduces to the two-level lowering operator
    np.testing.assert_allclose(cavity_model(1.0, 0.0, 1).L, SIGMA_MINUS)


def test_cavity_truncated_commutator_defect():
    levels = 10
    m = cavity_model(1.0, 1.0, levels)
    b = np.asarray(m.L)
    comm = b @ b.conj().T - b.conj().T @ b
    expected = np.eye(levels + 1, dtype=complex)
    expected[-1, -1] = -levels
    np.testing.assert_allclose(comm, expected, atol=1e-12)


def test_model_validation():
    with pytest.raises(ValueError, match="unitary"):
        custom_model(2 * np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(ValueError, match="self-adjoint"):
        custom_model(np.eye(2), np.zeros((2, 2)), np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        custom_model(np.eye(2), np.zeros((3, 3)), np.zeros((2, 2)))


def test_scalar_model():
    m = scalar_model(0.5, h=0.25)
    assert m.d == 1
    assert m.L[0, 0] == 0.5
    assert m.H[0, 0] == 0.25
