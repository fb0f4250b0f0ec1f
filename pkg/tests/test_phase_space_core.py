import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussym.phase_space_core import (
    DomainError, PhaseSpaceMatrix, UncertaintyWarning, antisym_kernel, bloch_messiah, complexify,
    convert_basis, direct_sum, embed, is_orthogonal_symplectic, is_symplectic, matrix_function_spd,
    omega, realify, rel_residual, symplectic_eigenvalues, symplectic_inverse, williamson, zeta,
)
from gaussym.sampling import random_state, random_symplectic
from oracles import brute_symplectic_eigs

seeds = st.integers(min_value=0, max_value=10_000)
modes = st.integers(min_value=1, max_value=4)


def test_omega_and_zeta():
    Om = omega(2)
    assert np.allclose(Om[:2, :2], [[0, 1], [-1, 0]])
    assert np.allclose(Om @ Om, -np.eye(4))
    assert np.allclose(zeta(1), np.diag([1, -1]))


@settings(max_examples=30, deadline=None)
@given(n=modes, seed=seeds)
def test_random_symplectic_is_symplectic(n, seed):
    V = random_symplectic(n, seed)
    assert is_symplectic(V)
    assert np.allclose(symplectic_inverse(V) @ V, np.eye(2 * n), atol=1e-10)


def test_non_symplectic_rejected():
    assert not is_symplectic(np.diag([2.0, 2.0]))
    assert not is_symplectic(np.diag([1.0, -1.0]))


@settings(max_examples=30, deadline=None)
@given(n=modes, seed=seeds)
def test_williamson_diagonalises(n, seed):
    sig = random_state(n, seed).sigma
    S, nu = williamson(sig)
    assert is_symplectic(S)
    assert rel_residual(S @ sig @ S.T, np.kron(np.diag(nu), np.eye(2))) < 1e-9
    assert np.all(np.diff(nu) <= 1e-12)
    assert np.allclose(nu, brute_symplectic_eigs(sig), rtol=1e-9)
    assert np.allclose(symplectic_eigenvalues(sig), nu, rtol=1e-9)


def test_unphysical_symplectic_eigenvalue_warns():
    with pytest.warns(UncertaintyWarning):
        symplectic_eigenvalues(0.5 * np.eye(2))


@settings(max_examples=20, deadline=None)
@given(n=modes, seed=seeds)
def test_bloch_messiah_reconstructs(n, seed):
    V = random_symplectic(n, seed, scale=0.8)
    Op, D, O = bloch_messiah(V)
    assert rel_residual(Op @ D @ O.T, V) < 1e-9
    assert is_orthogonal_symplectic(Op) and is_orthogonal_symplectic(O)
    assert np.allclose(D, np.diag(np.diag(D)))


@settings(max_examples=20, deadline=None)
@given(n=modes, seed=seeds)
def test_realify_is_a_homomorphism(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert np.allclose(realify(A @ B), realify(A) @ realify(B))
    assert np.allclose(complexify(realify(A)), A)


@pytest.mark.parametrize("ttype", ["(1,1)", "(2,0)", "(0,2)"])
@pytest.mark.parametrize("target", ["complex", "real-xp-ordered"])
def test_convert_basis_round_trip(ttype, target):
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 4))
    there = convert_basis(A, ttype, target)
    back = convert_basis(there, ttype, "real-interleaved")
    assert np.allclose(back.entries, A)


def test_convert_basis_pairings_are_invariant():
    rng = np.random.default_rng(5)
    sig = random_state(2, 1).sigma
    H = rng.normal(size=(4, 4))
    H = H + H.T
    V = random_symplectic(2, 2)
    s_c = convert_basis(sig, "(2,0)", "complex").entries
    h_c = convert_basis(H, "(0,2)", "complex").entries
    assert np.isclose(np.trace(h_c @ s_c), np.trace(H @ sig))
    v_c = convert_basis(V, "(1,1)", "complex").entries
    assert np.allclose(convert_basis(v_c @ s_c @ v_c.T, "(2,0)", "real-interleaved", source="complex").entries,
                       V @ sig @ V.T)


def test_phase_space_matrix_json_round_trip():
    A = np.arange(16.0).reshape(4, 4)
    m = convert_basis(A, "(1,1)", "complex")
    again = PhaseSpaceMatrix.from_json(m.to_json())
    assert np.allclose(again.entries, m.entries) and again.basis_tag == "complex"


def test_matrix_function_domain():
    with pytest.raises(DomainError):
        matrix_function_spd(-np.eye(2), np.sqrt)
    assert np.allclose(matrix_function_spd(4 * np.eye(2), np.sqrt), 2 * np.eye(2))


def test_antisym_kernel_canonical_form():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(6, 6))
    A = A - A.T
    O, a, _ = antisym_kernel(A)
    assert np.allclose(O @ O.T, np.eye(6), atol=1e-10)
    canon = O @ A @ O.T
    assert np.allclose(canon, np.kron(np.diag(a), omega(1)), atol=1e-9)


def test_embed_and_direct_sum():
    M = np.arange(4.0).reshape(2, 2)
    E = embed(M, [1], 2)
    assert np.allclose(E[2:, 2:], M) and np.allclose(E[:2, :2], np.eye(2))
    assert direct_sum(np.eye(2), 2 * np.eye(2)).shape == (4, 4)
