import math

import numpy as np
import pytest

from gaussym.dilation import (
    certify_dilation, compose_stages, covariant_stinespring, fock_crosscheck, invariant_purification,
    one_mode_dilation, purification_circuit, purification_equivalence_unitary,
)
from gaussym.gaussian_channels import amplifier, attenuator, identity_channel, v_1sq, v_ps
from gaussym.gaussian_states import GaussianState, coherent, is_pure, partial_trace, tensor, thermal, transform
from gaussym.phase_space_core import InfeasibleError, direct_sum, embed, omega, rel_residual
from gaussym.representations import (
    conjugate_rep, direct_sum_rep, is_invariant_state, su2_schwinger, u1,
)
from gaussym.sampling import random_covariant_channel, random_invariant_state, random_invariant_unitary

REPS = {
    "u1_single": u1([1]),
    "u1_opposite": u1([1, -1]),
    "u1_squeezed_frame": u1([1, 2], direct_sum(v_1sq(0.3), v_1sq(-0.2))),
    "su2": su2_schwinger([(0, 1)]),
}


@pytest.mark.parametrize("name", REPS)
def test_purification_pure_invariant_and_reduces(name):
    rep = REPS[name]
    st_ = random_invariant_state(rep, 1)
    p = invariant_purification(st_, rep)
    assert is_pure(p, 1e-8)
    red = partial_trace(p, list(range(rep.n)))
    assert rel_residual(red.sigma, st_.sigma) < 1e-9 and np.allclose(red.d, st_.d)
    assert is_invariant_state(direct_sum_rep(rep, conjugate_rep(rep)), p.d, p.sigma)


def test_purification_thermal_off_diagonal_blocks():
    nbar = 0.7
    p = invariant_purification(thermal(nbar), u1([1]))
    nu = 2 * nbar + 1
    s = math.sqrt(nu ** 2 - 1)
    # the literal formula gives s * X here; s * Z is the same up to a quarter-turn on the purifier
    assert np.allclose(p.sigma[:2, 2:], s * np.array([[0, 1], [1, 0]]))
    rot = direct_sum(np.eye(2), v_ps(np.pi / 2))
    alt = rot @ p.sigma @ rot.T
    assert np.allclose(np.abs(alt[:2, 2:]), s * np.eye(2))


def test_purification_of_pure_state_is_product():
    p = invariant_purification(GaussianState(np.zeros(2), np.eye(2)), u1([1]))
    assert np.allclose(p.sigma, np.eye(4))


def test_purification_rejects_non_invariant():
    with pytest.raises(InfeasibleError):
        invariant_purification(coherent(0.5), u1([1]))


@pytest.mark.parametrize("seed", range(5))
def test_purification_circuit_matches_closed_form(seed):
    rep = u1([1, -1])
    st_ = random_invariant_state(rep, seed, displacement=False)
    stages = purification_circuit(st_, rep)
    M = compose_stages(stages)
    out = M @ np.eye(8) @ M.T
    assert rel_residual(out, invariant_purification(st_, rep).sigma) < 1e-8
    assert [s.antisymplectic for s in stages] == [False, True, True]
    Om = omega(4)
    assert np.allclose(M @ Om @ M.T, Om, atol=1e-9)


def test_equivalence_unitary_recovers_planted_unitary():
    rep = u1([1])
    p1 = invariant_purification(thermal(0.6), rep)
    W = random_invariant_unitary(conjugate_rep(rep), 3).V
    p2 = transform(p1, embed(W, [1], 2))
    U = purification_equivalence_unitary(p1, p2, conjugate_rep(rep), [1])
    assert np.allclose(U.V, W, atol=1e-8)


def test_equivalence_unitary_with_idle_ancilla():
    rep = u1([1, -1])
    rep_B = direct_sum_rep(rep, u1([1]))
    p1 = tensor(invariant_purification(thermal(0.4), u1([1])), GaussianState(np.zeros(4), np.eye(4)))
    W = random_invariant_unitary(rep_B, 9, displacement=False).V
    p2 = transform(p1, embed(W, [1, 2, 3], 4))
    U = purification_equivalence_unitary(p1, p2, rep_B, [1, 2, 3])
    out = transform(p1, embed(U.V, [1, 2, 3], 4), np.concatenate([np.zeros(2), U.xi]))
    assert rel_residual(out.sigma, p2.sigma) < 1e-8


def test_equivalence_rejects_different_marginals():
    p1 = invariant_purification(thermal(0.4), u1([1]))
    p2 = invariant_purification(thermal(0.5), u1([1]))
    with pytest.raises(InfeasibleError):
        purification_equivalence_unitary(p1, p2, conjugate_rep(u1([1])), [1])


@pytest.mark.parametrize("alpha", [0.2, 0.7, 1.3])
@pytest.mark.parametrize("nbar", [0.0, 0.5, 2.0])
def test_one_mode_attenuator_and_amplifier(alpha, nbar):
    for kind, ref in (("attenuator", attenuator), ("amplifier", amplifier)):
        res = one_mode_dilation(kind, alpha, nbar)
        rec = res.reconstructed_channel()
        target = ref(alpha, nbar)
        assert np.allclose(rec.X, target.X, atol=1e-9) and np.allclose(rec.Y, target.Y, atol=1e-9)
        assert res.invariance_residual < 1e-10 and res.residual < 1e-9


def test_one_mode_phase_covariant():
    res = one_mode_dilation("phase_covariant", 0.4, alpha_loss=0.8)
    assert res.residual < 1e-9 and res.invariance_residual < 1e-10
    assert res.n_ancilla == 2


def test_one_mode_rejects_bad_input():
    with pytest.raises(ValueError):
        one_mode_dilation("phase_covariant", 0.4)
    with pytest.raises(ValueError):
        one_mode_dilation("attenuator", 0.4, nbar=-1)
    with pytest.raises(ValueError):
        one_mode_dilation("teleporter", 0.4)


@pytest.mark.parametrize("name", ["u1_single", "u1_opposite", "u1_squeezed_frame", "su2"])
def test_covariant_stinespring(name):
    rep = REPS[name]
    ch = random_covariant_channel(rep, rep, 5)
    res = covariant_stinespring(ch, rep, rep)
    assert res.residual <= 1e-7 and res.invariance_residual <= 1e-8
    assert is_pure(res.ancilla_state, 1e-8)
    anc_rep = direct_sum_rep(res.reps[1], res.reps[2])
    assert is_invariant_state(anc_rep, res.ancilla_state.d, res.ancilla_state.sigma)
    assert res.n_ancilla == 2 * rep.n


def test_covariant_stinespring_identity_channel():
    rep = u1([1])
    res = covariant_stinespring(identity_channel(1), rep, rep)
    assert res.residual <= 1e-7


def test_covariant_stinespring_rejects_non_covariant():
    from gaussym.gaussian_channels import GaussianChannel
    ch = GaussianChannel(v_1sq(0.4), np.eye(2) * 2, np.zeros(2))
    with pytest.raises(InfeasibleError):
        covariant_stinespring(ch, u1([1]), u1([1]))


def test_certify_flags_wrong_channel():
    res = one_mode_dilation("attenuator", 0.5)
    assert certify_dilation(res.V, res.ancilla_state, attenuator(0.6)) > 1e-3


def test_fock_crosscheck_pure_loss():
    res = one_mode_dilation("attenuator", 0.7)
    assert fock_crosscheck(res, coherent(0.6 + 0.3j), cutoff=25) < 1e-4


def test_to_json_has_stages():
    doc = one_mode_dilation("amplifier", 0.3, 0.5).to_json()
    assert [s["name"] for s in doc["stages"]][0] == "two_mode_squeezer_BBbar"
    assert doc["n_ancilla"] == 2
