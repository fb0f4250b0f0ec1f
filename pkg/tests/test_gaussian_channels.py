import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussym.gaussian_channels import (
    GaussianChannel, GaussianUnitary, amplifier, apply, attenuator, bogoliubov_to_real, compose,
    entangler, identity_channel, phase_covariant, random_covariant_channel, standard_unitary,
    su2_covariant_channel, su2_cp_bound, su2_x, tensor, v_2sq, v_bs, v_ps, validate_cp,
)
from gaussym.gaussian_states import coherent, thermal
from gaussym.phase_space_core import is_symplectic, omega
from gaussym.representations import (
    conjugate_rep, direct_sum_rep, is_covariant_channel, is_invariant_unitary, su2_schwinger, u1,
)
from gaussym.sampling import random_state

ANGLE = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@pytest.mark.parametrize("V", [v_ps(0.3), v_bs(0.7), v_2sq(0.5)])
def test_gates_symplectic(V):
    assert is_symplectic(V)


def test_non_symplectic_unitary_rejected():
    with pytest.raises(ValueError):
        GaussianUnitary(2 * np.eye(2))


@pytest.mark.parametrize("alpha", [0.1, 0.6, 1.2])
@pytest.mark.parametrize("nbar", [0.0, 0.5, 2.0])
def test_standard_channels_cp(alpha, nbar):
    assert validate_cp(attenuator(alpha, nbar))
    assert validate_cp(amplifier(alpha, nbar))


def test_sub_threshold_noise_is_not_cp():
    ch = GaussianChannel(0.5 * np.eye(2), 0.5 * np.eye(2), np.zeros(2))   # needs y >= 1 - x^2 = 0.75
    assert not validate_cp(ch)


def test_attenuator_action():
    out = apply(attenuator(0.6, 0.5), coherent(1.0))
    assert np.allclose(out.d, math.cos(0.6) * coherent(1.0).d)
    assert np.allclose(out.sigma, (math.cos(0.6) ** 2 + 2 * math.sin(0.6) ** 2) * np.eye(2))


def test_phase_covariant_composition():
    ch = phase_covariant(0.4, 0.7)
    assert np.allclose(ch.X, math.cosh(0.4) * math.cos(0.7) * np.eye(2))
    assert np.allclose(ch.Y, (math.cosh(0.4) ** 2 * math.sin(0.7) ** 2 + math.sinh(0.4) ** 2) * np.eye(2))
    assert validate_cp(ch)


def test_compose_matches_sequential_apply():
    a, b = attenuator(0.3, 0.2), amplifier(0.5, 0.1)
    st_ = thermal(0.3)
    lhs = apply(compose(b, a), st_)
    rhs = apply(b, apply(a, st_))
    assert np.allclose(lhs.sigma, rhs.sigma) and np.allclose(lhs.d, rhs.d)


def test_tensor_and_identity():
    ch = tensor(identity_channel(1), attenuator(0.3))
    assert ch.n_in == 2 and validate_cp(ch)


def test_json_round_trip():
    ch = amplifier(0.3, 0.2)
    again = GaussianChannel.from_json(ch.to_json())
    assert np.allclose(again.X, ch.X) and np.allclose(again.Y, ch.Y)


def test_standard_unitary_displacement():
    U = standard_unitary("displacement", [1.0, 2.0])
    out = apply(U.channel, coherent(0))
    assert np.allclose(out.d, [1, 2])
    inv = U.inverse()
    assert np.allclose(inv.xi, [-1, -2])


@settings(max_examples=200, deadline=None)
@given(xp=st.floats(-2, 2), xm=st.floats(-2, 2), theta=ANGLE, phi=ANGLE, y=st.floats(0, 6))
def test_su2_bound_matches_eigenvalue_check(xp, xm, theta, phi, y):
    bound = su2_cp_bound(xp, xm)
    if abs(y - bound) < 1e-8:
        return
    ch = su2_covariant_channel(xp, xm, theta, phi, y)
    assert bool(validate_cp(ch, tol=1e-10)) == (y > bound)


def test_su2_channel_is_covariant():
    rep = su2_schwinger([(0, 1)])
    ch = su2_covariant_channel(0.7, 0.4, 0.3, 1.1, 2.0)
    assert is_covariant_channel(rep, rep, ch)
    assert np.allclose(su2_x(1, 0, 0, 0), np.eye(4))


def test_entangler_single_mode_is_two_mode_squeezer():
    assert np.allclose(entangler(np.array([[0.5]])).V, v_2sq(0.5))


def test_entangler_invariance():
    rng = np.random.default_rng(2)
    r = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    r = 0.4 * r / np.linalg.norm(r, 2)
    U = entangler(r)
    assert is_symplectic(U.V)
    # invariant when the second system carries the conjugate action
    rep = direct_sum_rep(u1([1, 1]), conjugate_rep(u1([1, 1])))
    assert is_invariant_unitary(rep, U.xi, U.V)


def test_bogoliubov_identity():
    assert np.allclose(bogoliubov_to_real(np.eye(2), np.zeros((2, 2))), np.eye(4))


@pytest.mark.parametrize("rep", [u1([1]), u1([1, -1]), su2_schwinger([(0, 1)])])
def test_random_covariant_channels(rep):
    for seed in range(5):
        ch = random_covariant_channel(rep, rep, seed)
        assert validate_cp(ch)
        assert is_covariant_channel(rep, rep, ch)
        st_ = random_state(rep.n, seed)
        assert apply(ch, st_).is_physical()


def test_omega_preserved_by_unitary_channel():
    U = GaussianUnitary(v_bs(0.3) @ np.kron(np.eye(2), v_ps(0.2)))
    assert np.allclose(U.V @ omega(2) @ U.V.T, omega(2))
