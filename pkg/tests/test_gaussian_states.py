import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussym.gaussian_channels import v_2sq
from gaussym.gaussian_states import (
    GaussianState, coherent, epr, is_pure, partial_trace, phase_avg_free, power_state, purity,
    sigma_alpha, sigma_inf, squeezed, standard_state, symplectic_spectrum, tensor, thermal,
    transform, vacuum, von_neumann_entropy,
)
from gaussym.phase_space_core import DomainError, williamson
from gaussym.sampling import random_state, random_symplectic
from oracles import thermal_entropy


def test_standard_states():
    assert np.allclose(vacuum(2).sigma, np.eye(4))
    c = coherent(1 + 2j)
    assert np.allclose(c.d, math.sqrt(2) * np.array([1, 2]))
    assert np.allclose(thermal(1.5).sigma, 4 * np.eye(2))
    assert np.allclose(squeezed(0.3).sigma, np.diag([math.exp(0.6), math.exp(-0.6)]))
    V = v_2sq(0.4)
    assert np.allclose(epr(0.4).sigma, V @ V.T)
    assert np.allclose(phase_avg_free([1.0, 3.0]).sigma, np.diag([1, 1, 3, 3]))
    assert standard_state("coherent", 0.5, modes=2).n == 2


def test_invalid_state_rejected():
    with pytest.raises(ValueError):
        thermal(-1)
    with pytest.raises(ValueError):
        GaussianState(np.zeros(2), np.array([[1, 2], [0, 1]]))


def test_unphysical_flagged():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        st_ = GaussianState(np.zeros(2), 0.5 * np.eye(2))
        assert not st_.is_physical()


@pytest.mark.parametrize("nbar", [0.0, 0.5, 1.0, 3.0])
def test_thermal_entropy(nbar):
    assert np.isclose(von_neumann_entropy(thermal(nbar)), thermal_entropy(nbar), atol=1e-12)
    assert np.isclose(purity(thermal(nbar)), 1 / (2 * nbar + 1))


def test_entropy_base_two():
    assert np.isclose(von_neumann_entropy(thermal(1.0), base="2"), 2.0)


def test_epr_marginal_is_thermal():
    r = 0.6
    m = partial_trace(epr(r), [0])
    assert np.allclose(m.sigma, math.cosh(2 * r) * np.eye(2))
    assert is_pure(epr(r)) and not is_pure(m)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), alpha=st.floats(0.05, 0.95))
def test_sigma_alpha_properties(seed, alpha):
    st_ = random_state(2, seed)
    sa = sigma_alpha(st_.sigma, alpha)
    # symplectic spectrum transforms as coth(alpha * arccoth nu), with the same S
    S, nu = williamson(st_.sigma)
    expected = 1 / np.tanh(alpha * np.arctanh(1 / nu))
    assert np.allclose(S @ sa @ S.T, np.kron(np.diag(expected), np.eye(2)), atol=1e-8)
    assert np.allclose(sigma_alpha(st_.sigma, 1.0), st_.sigma, atol=1e-9)


def test_sigma_alpha_pure_unchanged_and_mixed_with_unit_nu_rejected():
    s = squeezed(0.5).sigma
    assert np.allclose(sigma_alpha(s, 0.3), s)
    mixed_partly_pure = np.diag([1.0, 1.0, 3.0, 3.0])
    with pytest.raises(DomainError):
        sigma_alpha(mixed_partly_pure, 0.5)


def test_sigma_inf_is_pure():
    st_ = random_state(2, 4)
    si = sigma_inf(st_.sigma)
    assert np.allclose(symplectic_spectrum(GaussianState(np.zeros(4), si)), 1, atol=1e-8)


def test_power_state_keeps_displacement():
    st_ = random_state(1, 9)
    p = power_state(st_, 0.5)
    assert np.allclose(p.d, st_.d)


def test_transform_and_tensor():
    V = random_symplectic(2, 1)
    st_ = tensor(coherent(0.3), thermal(0.2))
    out = transform(st_, V, np.ones(4))
    assert np.allclose(out.sigma, V @ st_.sigma @ V.T)
    assert np.allclose(out.d, V @ st_.d + 1)
    assert np.isclose(von_neumann_entropy(out), von_neumann_entropy(st_))


def test_json_round_trip():
    st_ = random_state(2, 0)
    again = GaussianState.from_json(st_.to_json())
    assert np.allclose(again.sigma, st_.sigma) and np.allclose(again.d, st_.d)
