import math

import numpy as np
import pytest

from gaussym import fock_oracle as fo
from gaussym.gaussian_channels import apply, attenuator, v_2sq, v_bs
from gaussym.gaussian_states import coherent, epr, squeezed, thermal, vacuum
from gaussym.monotones import relent_asym_u1
import oracles


def test_ladder_commutator_below_cutoff():
    a = fo.ladder(0, 1, 10).entries
    comm = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(np.diag(comm)[:-1], 1)


def test_number_operator():
    assert np.allclose(np.diag(fo.number(0, 1, 5).entries), np.arange(5))


def test_coherent_weights_are_poisson():
    fs = fo.gaussian_to_fock(coherent(1.0), 30)
    k = np.arange(10)
    expected = np.exp(-1) / np.array([math.factorial(x) for x in k])
    assert np.allclose(np.diag(fs.rho).real[:10], expected, atol=1e-10)


def test_thermal_weights_geometric():
    fs = fo.gaussian_to_fock(thermal(1.0), 60)
    k = np.arange(20)
    assert np.allclose(np.diag(fs.rho).real[:20], 0.5 ** (k + 1), atol=1e-10)


def test_squeezed_even_levels_only():
    fs = fo.gaussian_to_fock(squeezed(0.8), 60)
    p = np.diag(fs.rho).real
    assert np.all(p[1::2] < 1e-12) and p[2] > 1e-3


@pytest.mark.parametrize("state", [vacuum(1), coherent(1.2 - 0.7j), squeezed(0.6), thermal(1.5)],
                         ids=["vacuum", "coherent", "squeezed", "thermal"])
def test_moment_round_trip(state):
    fs = fo.gaussian_to_fock(state, 45)
    d, s = fo.extract_moments(fs)
    assert np.allclose(d, state.d, atol=1e-6) and np.allclose(s, state.sigma, atol=1e-6)


def test_epr_round_trip_two_modes():
    st_ = epr(0.5)
    d, s = fo.extract_moments(fo.gaussian_to_fock(st_, 25))
    V = v_2sq(0.5)
    assert np.allclose(s, V @ V.T, atol=1e-6)


def test_cutoff_error_suggests_larger_cutoff():
    with pytest.raises(fo.CutoffError, match="try cutoff"):
        fo.gaussian_to_fock(coherent(4.0), 10)


def test_dephase_coherent_entropy_matches_series():
    fs = fo.u1_dephase(fo.gaussian_to_fock(coherent(1.0), 30), [1])
    assert fo.entropy(fs) == pytest.approx(relent_asym_u1("coherent", 1.0), abs=1e-6)


def test_dephase_squeezed_entropy_matches_series():
    r = 0.5
    fs = fo.u1_dephase(fo.gaussian_to_fock(squeezed(r), 50), [1])
    assert fo.entropy(fs) == pytest.approx(relent_asym_u1("squeezed", r), abs=1e-6)


def test_dephase_idempotent_and_diagonal_fixed():
    fs = fo.gaussian_to_fock(coherent(0.7), 20)
    once = fo.u1_dephase(fs, [1])
    assert np.allclose(fo.u1_dephase(once, [1]).rho, once.rho)
    th = fo.gaussian_to_fock(thermal(0.5), 40)
    assert np.allclose(fo.u1_dephase(th, [1]).rho, th.rho)


def test_reflection_moments():
    fs = fo.apply_unitary(fo.reflect_vacuum_unitary(1, 40), fo.fock_coherent(1.0, 40))
    d, s = fo.extract_moments(fs)
    c, d2, s2 = oracles.reflection_moments(1.0)
    assert c == pytest.approx(1 - 2 / math.e)
    assert np.allclose(d, d2, atol=1e-6) and np.allclose(s, s2, atol=1e-6)
    assert np.trace(s) + 2 * d @ d == pytest.approx(6.0, abs=1e-6)


def test_reflection_on_vacuum_is_trivial():
    fs = fo.apply_unitary(fo.reflect_vacuum_unitary(1, 10), fo.fock_vacuum(1, 10))
    d, s = fo.extract_moments(fs)
    assert np.allclose(d, 0) and np.allclose(s, np.eye(2))


def test_entropy_and_overlap():
    assert fo.entropy(fo.fock_coherent(0.8, 30)) == pytest.approx(0, abs=1e-8)
    assert fo.entropy(fo.fock_thermal(1.0, 80)) == pytest.approx(2 * math.log(2), abs=1e-8)
    assert fo.overlap(fo.fock_vacuum(1, 30), fo.fock_coherent(0.9, 30)) == pytest.approx(math.exp(-0.81), abs=1e-10)


def test_attenuator_via_beam_splitter():
    alpha = 0.6
    joint = fo.fock_tensor(fo.fock_vacuum(1, 20), fo.fock_coherent(0.9 + 0.2j, 20))
    # ordered pair (ancilla, input) so the transmitted amplitude is +cos(alpha)
    U = fo.gaussian_unitary_op(v_bs(np.pi / 2 - alpha), cutoff=20)
    out = fo.partial_trace_fock(fo.apply_unitary(U, joint), [0])
    d, s = fo.extract_moments(out)
    ref = apply(attenuator(alpha), coherent(0.9 + 0.2j))
    assert np.allclose(d, ref.d, atol=1e-5) and np.allclose(s, ref.sigma, atol=1e-5)
    assert U.unitarity_defect < 1e-8


def test_fock_apply_gaussian_matches_phase_space():
    st_ = coherent(0.5)
    fs = fo.gaussian_to_fock(st_, 30)
    out = fo.fock_apply_gaussian(fs, np.diag([math.exp(0.3), math.exp(-0.3)]), np.array([0.2, -0.1]))
    d, s = fo.extract_moments(out)
    assert np.allclose(d, np.diag([math.exp(0.3), math.exp(-0.3)]) @ st_.d + [0.2, -0.1], atol=1e-6)
    assert np.allclose(s, np.diag([math.exp(0.6), math.exp(-0.6)]), atol=1e-6)
