import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lengthopt.core import FrequencyLengthTable, affine, apply_length_transform, mean_token_length, minimum_baseline
from lengthopt.errors import DegenerateTable, ZeroLength, ZeroVariance
from lengthopt.scores import (
    eta,
    omega,
    omega_exact,
    omega_rho,
    psi,
    psi_decomposition,
    rho_min,
    score_report,
    tau,
    tau_min,
)

from conftest import random_table
from oracles import all_arrangements, brute_baselines, pairs_pure, tau_pure

small_tables = st.integers(2, 6).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(1, 30), min_size=n, max_size=n),
        st.lists(st.integers(0, 8), min_size=n, max_size=n),
    )
)

SORTED_OPTIMAL = FrequencyLengthTable.from_columns([100, 20, 5], [1, 2, 3])
SORTED_WORST = FrequencyLengthTable.from_columns([100, 20, 5], [3, 2, 1])


def test_three_type_scores(three_types):
    assert eta(three_types) == pytest.approx(1.24 / 1.88, abs=1e-15)
    assert psi(three_types) == pytest.approx(0.12 / 0.76, abs=1e-15)
    assert tau(three_types)[0] == pytest.approx(-1 / 3)
    assert tau_min(three_types)[0] == -1
    assert omega(three_types) == pytest.approx(1 / 3, abs=1e-15)
    assert omega_exact(three_types) == Fraction(1, 3)


def test_optimal_and_reversed_arrangements():
    assert eta(SORTED_OPTIMAL) == psi(SORTED_OPTIMAL) == omega(SORTED_OPTIMAL) == omega_rho(SORTED_OPTIMAL) == 1.0
    assert mean_token_length(SORTED_WORST, exact=True) == Fraction(345, 125)
    assert psi(SORTED_WORST) == pytest.approx(-1.0, abs=1e-15)


def test_degenerate_scores():
    with pytest.raises(ZeroLength):
        eta(FrequencyLengthTable.from_columns([1, 2], [0, 0]))
    flat = FrequencyLengthTable.from_columns([5, 2, 1], [3, 3, 3])
    with pytest.raises(DegenerateTable):
        psi(flat)
    with pytest.raises(DegenerateTable):
        omega(flat)
    assert tau_min(flat)[0] == 0
    with pytest.raises(DegenerateTable):
        psi(FrequencyLengthTable.from_columns([4, 4, 4], [1, 2, 3]))
    with pytest.raises(ZeroVariance):
        psi_decomposition(flat)


def test_tau_min_with_tie_in_p():
    freqs, lengths = [5, 3, 3, 1], [4, 1, 7, 2]
    t = FrequencyLengthTable.from_columns(freqs, lengths)
    _, _, taus = brute_baselines(freqs, lengths)
    assert taus == {Fraction(-5, 6)}
    assert tau_min(t)[0] == pytest.approx(-5 / 6)


def test_omega_rho_three_types(three_types):
    assert rho_min(three_types) == pytest.approx(-1.0)
    assert omega_rho(three_types) == pytest.approx(0.5)


def test_psi_decomposition_three_types(three_types):
    d = psi_decomposition(three_types)
    assert d.s_pl == pytest.approx(-0.06, abs=1e-15)
    assert d.s_l == pytest.approx(1.0)
    # s_p from p = (0.8, 0.16, 0.04) with mean 1/3
    s_p = math.sqrt(((0.8 - 1 / 3) ** 2 + (0.16 - 1 / 3) ** 2 + (0.04 - 1 / 3) ** 2) / 2)
    assert d.s_p == pytest.approx(s_p, rel=1e-14)
    assert d.r == pytest.approx(-0.06 / s_p, rel=1e-13)
    assert d.a == pytest.approx(2 * s_p / 0.76, rel=1e-13)
    assert d.a == pytest.approx(1.0752, abs=1e-4)
    assert -d.a * d.r == pytest.approx(0.1579, abs=1e-4)


def test_psi_decomposition_random_tables():
    rng = np.random.default_rng(11)
    for _ in range(20):
        t = FrequencyLengthTable.from_columns(rng.zipf(1.5, 100).clip(max=10**6).tolist(),
                                              rng.integers(1, 15, 100).tolist())
        d = psi_decomposition(t)
        assert abs(d.psi + d.a * d.r) < 1e-10
        assert abs(d.s_pl - (d.L - d.L_r) / (t.n - 1)) < 1e-10


def test_score_report_three_types(three_types):
    rep = score_report(three_types, with_rho=True, with_gamma=True)
    assert (rep.L, rep.L_min, rep.L_r) == pytest.approx((1.88, 1.24, 2.0))
    assert rep.eta == pytest.approx(0.6596, abs=1e-4)
    assert rep.psi == pytest.approx(0.158, abs=1e-3)
    assert rep.omega == pytest.approx(1 / 3)
    assert rep.gamma == pytest.approx(-1 / 3)
    assert rep.omega_rho == pytest.approx(0.5)
    assert rep.absent == {}


def test_score_report_single_type():
    rep = score_report(FrequencyLengthTable.from_columns([7], [4]), with_rho=True)
    assert rep.L == 4 and rep.eta == 1
    assert rep.psi is None and rep.omega is None
    assert rep.absent["psi"].startswith("DegenerateTable")
    assert rep.absent["omega"].startswith("DegenerateTable")
    assert not rep.all_scores_absent


def test_psi_not_invariant_under_exponential(three_types):
    h = apply_length_transform(three_types, lambda l: 2.0 ** l)
    # brute-force recomputation on lengths (4, 2, 8)
    L_min, L_r, _ = brute_baselines([100, 20, 5], [4, 2, 8])
    L = Fraction(100 * 4 + 20 * 2 + 5 * 8, 125)
    assert (L, L_r, L_min) == (Fraction(384, 100), Fraction(14, 3), Fraction(256, 100))
    expected = (L_r - L) / (L_r - L_min)
    assert psi(h) == pytest.approx(float(expected), rel=1e-14)
    assert abs(psi(h) - psi(three_types)) > 0.2
    assert eta(h) != pytest.approx(eta(three_types))
    assert omega(h) == omega(three_types)


def test_eta_changes_with_offset(three_types):
    shifted = apply_length_transform(three_types, affine(1, 1))
    assert eta(shifted) == pytest.approx(2.24 / 2.88)
    assert eta(shifted) != pytest.approx(eta(three_types))
    assert psi(shifted) == pytest.approx(psi(three_types), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(small_tables)
def test_tau_min_is_brute_force_minimum(cols):
    freqs, lengths = cols
    t = FrequencyLengthTable.from_columns(freqs, lengths)
    _, _, taus = brute_baselines(freqs, lengths)
    assert len(taus) == 1
    assert Fraction(tau_min(t)[1].n_c - tau_min(t)[1].n_d, t.n * (t.n - 1) // 2) == taus.pop()
    # and no arrangement at all gets below it
    lowest = min(tau_pure(freqs, arranged) for _, arranged in all_arrangements(freqs, lengths))
    assert tau_min(t)[0] == pytest.approx(float(lowest), abs=1e-15)
    no_ties = len(set(freqs)) == len(freqs) and len(set(lengths)) == len(lengths)
    assert (tau_min(t)[0] == -1) == no_ties


@settings(max_examples=200, deadline=None)
@given(small_tables)
def test_bounds_and_equality(cols):
    freqs, lengths = cols
    t = FrequencyLengthTable.from_columns(freqs, lengths)
    optimal = mean_token_length(t, exact=True) == minimum_baseline(t, exact=True)[0]
    for fn in (eta, psi, omega):
        try:
            value = fn(t)
        except (DegenerateTable, ZeroLength):
            continue
        assert value <= 1 + 1e-12
        if optimal:
            assert value == 1.0
        else:
            assert value < 1


@settings(max_examples=200, deadline=None)
@given(small_tables)
def test_omega_dual_form_exact(cols):
    freqs, lengths = cols
    t = FrequencyLengthTable.from_columns(freqs, lengths)
    try:
        value = omega_exact(t)
    except DegenerateTable:
        return
    nc, nd = pairs_pure(freqs, lengths)
    arr_f = sorted(freqs, reverse=True)
    arr_l = sorted(lengths)
    nc_min, nd_min = pairs_pure(arr_f, arr_l)
    assert nc_min == 0
    n2 = t.n * (t.n - 1) // 2
    assert value == Fraction(nc - nd, n2) / Fraction(nc_min - nd_min, n2) == Fraction(nd - nc, nd_min)


def test_invariance_fuzz():
    rng = np.random.default_rng(21)
    for _ in range(100):
        t = random_table(rng, float_lengths=bool(rng.integers(2)))
        try:
            base = (psi(t), omega(t), tau(t)[0], eta(t))
        except DegenerateTable:
            continue
        a, b = rng.uniform(0.1, 10), rng.uniform(0, 5)
        g = apply_length_transform(t, affine(a, b))
        assert abs(psi(g) - base[0]) < 1e-12
        assert abs(omega(g) - base[1]) < 1e-12
        assert abs(tau(g)[0] - base[2]) < 1e-12
        assert abs(eta(apply_length_transform(t, affine(a, 0))) - base[3]) < 1e-12
        for h in (lambda l: 2.0 ** l, lambda l: l * l, math.sqrt):
            ht = apply_length_transform(t, h)
            assert abs(omega(ht) - base[1]) < 1e-12
            assert abs(tau(ht)[0] - base[2]) < 1e-12
