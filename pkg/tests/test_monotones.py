import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussym.gaussian_channels import random_covariant_channel
from gaussym.gaussian_states import coherent, epr, squeezed, thermal
from gaussym.monotones import (
    conservation_report, figure3_rows, finite_difference_check_FQ, fisher_like_FQ,
    generator_charges, n_mean_to_param, petz_renyi_asymmetry, petz_renyi_batch, petz_renyi_flow,
    relent_asym_u1,
    type1_rank,
)
from gaussym.gaussian_channels import apply
from gaussym.representations import charge_matrix, su2_schwinger, u1
from gaussym.sampling import random_invariant_state, random_invariant_unitary, random_state
from gaussym.gaussian_states import transform
import oracles

Q1 = charge_matrix(u1([1]))


@settings(max_examples=30, deadline=None)
@given(t=st.floats(-3, 3), re=st.floats(-2, 2), im=st.floats(-2, 2))
def test_coherent_closed_form(t, re, im):
    g = complex(re, im)
    rpt = petz_renyi_flow(coherent(g), Q1, t)
    assert abs(rpt.components["combined"] - oracles.prf_coherent(t, g)) < 1e-10
    assert rpt.components["type2"] == pytest.approx(0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(t=st.floats(-3, 3), r=st.floats(0, 1.2))
def test_squeezed_closed_form(t, r):
    rpt = petz_renyi_flow(squeezed(r), Q1, t)
    assert abs(rpt.components["combined"] - oracles.prf_squeezed(t, r)) < 1e-10
    assert rpt.components["type1"] == pytest.approx(0, abs=1e-12)


def test_value_is_divergence_scaling():
    rpt = petz_renyi_asymmetry(coherent(1.0), u1([1]), 0.5, alpha=0.5)
    assert rpt.value == pytest.approx(2 * rpt.components["combined"])


@pytest.mark.parametrize("w", [0.5, 1.0, 2.0])
def test_fq_closed_forms(w):
    assert fisher_like_FQ(coherent(0.8 + 0.3j), w * Q1).value == pytest.approx(
        oracles.fq_coherent(w, 0.8 + 0.3j), abs=1e-10)
    assert fisher_like_FQ(squeezed(0.6), w * Q1).value == pytest.approx(oracles.fq_squeezed(w, 0.6), abs=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_fq_finite_difference(seed):
    st_ = random_state(2, seed, scale=0.4)
    Q = charge_matrix(u1([1, -1]))
    assert finite_difference_check_FQ(st_, Q) < 1e-4


def test_invariant_state_has_zero_monotones():
    rep = u1([1, -1])
    st_ = random_invariant_state(rep, 2)
    for g in (0.3, 1.0, 2.5):
        assert abs(petz_renyi_asymmetry(st_, rep, g).value) < 1e-10
    assert abs(fisher_like_FQ(st_, charge_matrix(rep)).value) < 1e-10


def test_invariant_unitary_preserves_monotone():
    rep = u1([1, 2])
    st_ = random_state(2, 3)
    U = random_invariant_unitary(rep, 4)
    out = transform(st_, U.V, U.xi)
    for g in (0.4, 1.3):
        a = petz_renyi_asymmetry(st_, rep, g).value
        b = petz_renyi_asymmetry(out, rep, g).value
        assert a == pytest.approx(b, rel=1e-8, abs=1e-10)


def test_su2_generator_charges_and_fq():
    rep = su2_schwinger([(0, 1)])
    Qs = generator_charges(rep)
    assert len(Qs) == 3
    st_ = random_state(2, 1)
    assert all(fisher_like_FQ(st_, Q).value >= -1e-10 for Q in Qs)


@pytest.mark.parametrize("n", [0.5, 1.0, 2.0, 4.0, 50.0])
def test_relent_series_against_frozen(n):
    assert relent_asym_u1("coherent", n_mean_to_param("coherent", n)) == pytest.approx(
        oracles.RELENT_COHERENT[n], abs=1e-10)
    assert relent_asym_u1("squeezed", n_mean_to_param("squeezed", n)) == pytest.approx(
        oracles.RELENT_SQUEEZED[n], abs=1e-10)


def test_relent_epr_closed_form():
    for r in (0.1, 0.7, 1.5):
        assert relent_asym_u1("epr", r) == pytest.approx(oracles.epr_relent(r), abs=1e-12)


def test_coherent_asymptote_close_at_large_n():
    a = n_mean_to_param("coherent", 50)
    assert abs(relent_asym_u1("coherent", a) - relent_asym_u1("coherent", a, "asymptotic")) < 0.02


def test_corrected_squeezed_asymptote_converges():
    gaps = []
    for n in (50, 200, 1000):
        r = n_mean_to_param("squeezed", n)
        gaps.append(abs(relent_asym_u1("squeezed", r) - relent_asym_u1("squeezed", r, "asymptotic_corrected")))
    assert gaps[0] > gaps[1] > gaps[2]


def test_relent_bad_kind():
    with pytest.raises(ValueError):
        relent_asym_u1("cat", 1.0)


def test_figure3_rows_shape_and_base():
    rows = figure3_rows(5, 0.5, 4)
    assert len(rows) == 4 and len(rows[0]) == 5
    rows2 = figure3_rows(5, 0.5, 4, base="2")
    assert rows2[1][1] == pytest.approx(rows[1][1] / math.log(2))


def test_type1_rank():
    rep = u1([1])
    assert type1_rank(coherent(0.5), rep, 1) == 1
    assert type1_rank(thermal(0.5), rep, 1) == 0


def test_conservation_report_unitary():
    rep = u1([1, -1])
    Q = charge_matrix(rep)
    st_ = random_state(2, 7)
    U = random_invariant_unitary(rep, 8)
    out = transform(st_, U.V, U.xi)
    rpt = conservation_report(st_, out, Q)
    assert abs(rpt["difference"]["combined"]) < 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_monotone_non_increasing_under_covariant_channel(seed):
    rep = u1([1, -1])
    st_ = random_state(2, seed)
    ch = random_covariant_channel(rep, rep, seed)
    out = apply(ch, st_)
    for g in (0.5, 2.0):
        assert petz_renyi_asymmetry(out, rep, g).value <= petz_renyi_asymmetry(st_, rep, g).value + 1e-7


def test_batch_matches_single_evaluations():
    rep = su2_schwinger([(0, 1)])
    st_ = random_state(2, 4)
    gs = [(0.1, 0.2, 0.3), (1.0, 2.0, 0.5)]
    batch = petz_renyi_batch(st_, rep, gs, (0.3, 0.5))
    single = [petz_renyi_asymmetry(st_, rep, g, a) for a in (0.3, 0.5) for g in gs]
    assert [b.value for b in batch] == pytest.approx([s.value for s in single], rel=1e-12)
