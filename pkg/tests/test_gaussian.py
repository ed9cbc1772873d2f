import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fading_dists
from fadingbc.core import IntervalSet, mu_gamma
from fadingbc.errors import DomainError
from fadingbc.gaussian import (
    FadingDist,
    awgn_rayleigh_outer,
    db_to_linear,
    enhance_continuous,
    ergodic_capacity,
    intermittent_capacity,
    intermittent_outer_boundary,
    intermittent_outer_points,
    outer_extreme_point,
    outer_region,
    outer_sweep,
    partition_states,
    threshold_log_weight,
)
from oracles import rayleigh_capacity_pdf_ref, rayleigh_capacity_ref


def test_intermittent_ccdf_is_left_continuous():
    S = FadingDist.intermittent(0.4, 10.0)
    assert S.ccdf(10.0) == pytest.approx(0.4)
    assert S.ccdf(10.0 + 1e-9) == 0.0
    assert S.atoms == (10.0,)


def test_rayleigh_ccdf():
    S = FadingDist.rayleigh(100.0)
    assert S.ccdf(np.array([0.0, 100.0])) == pytest.approx([1.0, math.exp(-1)])
    assert S.log_ccdf(1e6) == pytest.approx(-1e4)


def test_tabulated_and_mixture():
    T = FadingDist.tabulated([(1.0, 0.9), (5.0, 0.3)])
    assert T.ccdf(np.array([0.5, 1.0, 3.0, 5.0, 6.0])).tolist() == pytest.approx([0.9, 0.9, 0.3, 0.3, 0.0])
    M = FadingDist.mixture([0.5, 0.5], [T, FadingDist.rayleigh(10.0)])
    assert M.ccdf(3.0) == pytest.approx(0.5 * 0.3 + 0.5 * math.exp(-0.3))
    assert M.atoms == (1.0, 5.0)


@pytest.mark.parametrize(
    "bad",
    [
        lambda: FadingDist.intermittent(1.5, 10.0),
        lambda: FadingDist.rayleigh(-1.0),
        lambda: FadingDist.tabulated([(2.0, 0.5), (1.0, 0.4)]),
        lambda: FadingDist.tabulated([(1.0, 0.2), (2.0, 0.4)]),
        lambda: FadingDist.mixture([0.3, 0.3], [FadingDist.zero(), FadingDist.zero()]),
        lambda: FadingDist.from_dict({"kind": "nakagami"}),
        lambda: FadingDist.from_dict({"kind": "rayleigh"}),
    ],
)
def test_invalid_distributions(bad):
    with pytest.raises(DomainError):
        bad()


@given(fading_dists())
@settings(max_examples=30)
def test_json_round_trip(S):
    back = FadingDist.from_dict(S.to_dict())
    s = np.array([0.0, 0.3, 1.0, 7.0, 100.0, 5e3])
    assert back.ccdf(s) == pytest.approx(S.ccdf(s), rel=1e-12, abs=0)


@given(fading_dists())
@settings(max_examples=30)
def test_ccdf_is_valid(S):
    s = np.geomspace(1e-4, 1e5, 400)
    f = S.ccdf(s)
    assert np.all((f >= 0) & (f <= 1))
    assert np.all(np.diff(f) <= 1e-15)


def test_sampling_matches_ccdf():
    rng = np.random.default_rng(3)
    S = FadingDist.mixture([0.3, 0.7], [FadingDist.intermittent(1.0, 50.0), FadingDist.rayleigh(20.0)])
    x = S.sample(rng, 200_000)
    for t in (5.0, 20.0, 50.0, 60.0):
        emp = np.mean(x >= t)
        assert abs(emp - S.ccdf(t)) < 4 * math.sqrt(S.ccdf(t) * (1 - S.ccdf(t)) / x.size) + 1e-12


def test_custom_sampling_by_inversion():
    S = FadingDist.from_ccdf(lambda s: np.exp(-np.asarray(s) / 4.0))
    x = S.sample(np.random.default_rng(0), 100_000)
    assert x.mean() == pytest.approx(4.0, rel=0.02)


def test_ergodic_capacity_constant_channel():
    assert ergodic_capacity(FadingDist.intermittent(1.0, 100.0)) == pytest.approx(math.log2(101.0), abs=1e-9)
    assert ergodic_capacity(FadingDist.intermittent(0.4, 1e6)) == pytest.approx(0.4 * math.log2(1 + 1e6), abs=1e-9)
    assert ergodic_capacity(FadingDist.zero()) == 0.0


def test_ergodic_capacity_rayleigh():
    # frozen from the exponential-integral closed form (mpmath, 30 digits)
    assert ergodic_capacity(FadingDist.rayleigh(1000.0)) == pytest.approx(9.1436194910373308, abs=1e-8)
    assert ergodic_capacity(FadingDist.rayleigh(1000.0)) == pytest.approx(mu_gamma(1000.0, 0.0, math.inf), abs=1e-12)


@pytest.mark.parametrize("g", [0.1, 3.0, 1e4])
def test_ergodic_capacity_ccdf_form_matches_pdf_form(g):
    assert ergodic_capacity(FadingDist.rayleigh(g)) == pytest.approx(rayleigh_capacity_pdf_ref(g), abs=1e-6)
    assert rayleigh_capacity_pdf_ref(g) == pytest.approx(rayleigh_capacity_ref(g), rel=1e-12)


def test_partition_intermittent_pair():
    S1, S2 = FadingDist.intermittent(0.3, 100.0), FadingDist.intermittent(0.6, 10.0)
    i1, i2 = partition_states(S1, S2, 0.4)  # below p1/p2 = 1/2
    assert i1.approx_equal(IntervalSet(((0.0, 100.0),)))
    i1, i2 = partition_states(S1, S2, 0.5)  # at the tie, [0, s2*] goes to user 2
    assert i1.approx_equal(IntervalSet(((10.0, 100.0),)))
    assert i2.approx_equal(IntervalSet(((0.0, 10.0), (100.0, math.inf))))


def test_partition_equal_laws_all_to_user2():
    S = FadingDist.rayleigh(10.0)
    i1, i2 = partition_states(S, S, 1.0)
    assert i1.is_empty() and i2 == IntervalSet.full()


def test_partition_rayleigh_crossing():
    # exp(-s/100) > 2 exp(-s/10) exactly when s > ln 2 / (1/10 - 1/100)
    S1, S2 = FadingDist.rayleigh(100.0), FadingDist.rayleigh(10.0)
    i1, _ = partition_states(S1, S2, 2.0)
    cut = math.log(2.0) / (0.1 - 0.01)
    assert len(i1) == 1
    assert i1.intervals[0][0] == pytest.approx(cut, rel=1e-9)


@given(fading_dists(), fading_dists(), st.floats(0.0, 50.0))
@settings(max_examples=20, deadline=None)
def test_partition_totality(S1, S2, omega):
    i1, i2 = partition_states(S1, S2, omega, grid_points=512)
    assert i1.intersection(i2).is_empty()
    assert i1.union(i2) == IntervalSet.full()


def test_outer_intermittent_closed_form():
    p1, s1, p2, s2 = 0.3, 1e3, 0.7, 30.0
    S1, S2 = FadingDist.intermittent(p1, s1), FadingDist.intermittent(p2, s2)
    (c1, _), kink = intermittent_outer_points(p1, s1, p2, s2)
    assert outer_extreme_point(S1, S2, 0.1).as_tuple() == pytest.approx((c1, 0.0), abs=1e-9)
    assert outer_extreme_point(S1, S2, 2.0).as_tuple() == pytest.approx(kink, abs=1e-9)
    b = intermittent_outer_boundary(p1, s1, p2, s2)
    assert b.extreme_points[-1] == (0.0, intermittent_capacity(p2, s2))


def test_outer_closed_form_preconditions():
    with pytest.raises(DomainError):
        intermittent_outer_points(0.5, 10.0, 0.4, 5.0)


def test_awgn_rayleigh_closed_form():
    p1, s1, g2 = 0.4, db_to_linear(60), db_to_linear(30)
    S1, S2 = FadingDist.intermittent(p1, s1), FadingDist.rayleigh(g2)
    for so in (0.0, 50.0, 3e3, 2e5):
        got = outer_extreme_point(S1, S2, log_omega=threshold_log_weight(p1, g2, so))
        assert got.as_tuple() == pytest.approx(awgn_rayleigh_outer(p1, s1, g2, so), abs=1e-6)


def test_outer_monotone_in_weight():
    S1, S2 = FadingDist.rayleigh(100.0), FadingDist.intermittent(0.7, 30.0)
    pts = outer_sweep(S1, S2, np.geomspace(0.01, 100, 25))
    r1 = [p.R1 for p in pts]
    r2 = [p.R2 for p in pts]
    assert all(b <= a + 1e-9 for a, b in zip(r1, r1[1:]))
    assert all(b >= a - 1e-9 for a, b in zip(r2, r2[1:]))
    assert pts[-1].as_tuple() == pytest.approx((0.0, ergodic_capacity(S2)))


def test_outer_region_awgn_pair_endpoints():
    S1, S2 = FadingDist.intermittent(1.0, 100.0), FadingDist.intermittent(1.0, 10.0)
    r = outer_region(S1, S2, np.geomspace(0.1, 10, 16))
    assert r.extreme_points[0] == pytest.approx((math.log2(101), 0.0))
    assert r.extreme_points[-1] == pytest.approx((0.0, math.log2(11)))


def test_outer_region_silent_user2():
    S1 = FadingDist.rayleigh(10.0)
    r = outer_region(S1, FadingDist.zero(), [0.5, 1.0, 2.0])
    assert len(r.extreme_points) == 1
    assert r.extreme_points[0][0] == pytest.approx(ergodic_capacity(S1))


def test_enhancement_examples():
    S1, S2 = FadingDist.intermittent(0.4, 1e3), FadingDist.rayleigh(1e2)
    enh = enhance_continuous(S1, S2, 1.0)
    s = np.linspace(0.0, 2e3, 10_000)
    # hand split: below s1* the max is 0.4 vs exp(-s/100); above it only the Rayleigh part remains
    expect = np.where(s <= 1e3, np.maximum(0.4, np.exp(-s / 1e2)), np.exp(-s / 1e2))
    assert enh.ccdf(s) == pytest.approx(expect, abs=1e-15)
    same = enhance_continuous(S2, S2, 2.0)
    assert same.ccdf(s) == pytest.approx(np.minimum(1.0, 2 * S2.ccdf(s)))
    alone = enhance_continuous(S2, FadingDist.zero(), 2.0)
    assert alone.ccdf(s) == pytest.approx(S2.ccdf(s))
    with pytest.raises(DomainError):
        enhance_continuous(S1, S2, 0.5)


@given(fading_dists(), fading_dists(), st.floats(1.0, 20.0))
@settings(max_examples=15, deadline=None)
def test_enhancement_properties(S1, S2, omega):
    enh = enhance_continuous(S1, S2, omega)
    s = np.geomspace(1e-3, 1e5, 300)
    f = enh.ccdf(s)
    assert np.all(f >= S1.ccdf(s) - 1e-15)
    assert np.all(np.diff(f) <= 1e-15)
    # on I1(omega) the enhanced law coincides with S1
    i1, _ = partition_states(S1, S2, omega, grid_points=512)
    inside = np.array([i1.contains(x) for x in s])
    assert np.allclose(f[inside], S1.ccdf(s[inside]), rtol=1e-12, atol=0)


def test_enhancement_enlarges_outer_region():
    S1, S2 = FadingDist.rayleigh(30.0), FadingDist.intermittent(0.6, 100.0)
    ws = np.geomspace(0.1, 10, 9)
    base = outer_region(S1, S2, ws)
    enh = outer_region(enhance_continuous(S1, S2, 2.0), S2, ws)
    for w in ws:
        assert enh.weighted_max(w) >= base.weighted_max(w) - 1e-8
