import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import pmf_pairs, random_pmf
from fadingbc.erasure import (
    ErasurePmf,
    LevelPartition,
    achievable_rates,
    achievable_weighted_rate,
    brute_force_weighted_rate,
    capacity_region,
    converse_weighted_rate,
    critical_weights,
    enhance_channel,
    is_degraded,
    erasure_identity_check,
    partition_levels,
)
from fadingbc.errors import DomainError
from oracles import erasure_brute_force

omegas = st.floats(0, 20)


def test_ccdf_values(ex1, ex2):
    n1, _ = ex1
    assert n1.ccdf(1) == 0.75
    assert n1.ccdf(0) == 1.0
    assert n1.ccdf(3) == 0.0
    assert ex2[0].ccdf(2) == 0.0
    with pytest.raises(DomainError):
        n1.ccdf(4)


def test_pmf_validation():
    with pytest.raises(DomainError):
        ErasurePmf(2, (0.5, 0.5))
    with pytest.raises(DomainError):
        ErasurePmf(1, (0.6, 0.6))
    with pytest.raises(DomainError):
        ErasurePmf(1, (-0.1, 1.1))
    with pytest.raises(DomainError):
        ErasurePmf.from_ccdf([1.0, 0.2, 0.5])


def test_pmf_json_round_trip(ex1):
    n1 = ex1[0]
    assert ErasurePmf.from_dict({"q": 2, "pmf": [0.25, 0.5, 0.25]}) == n1
    assert ErasurePmf.from_ccdf(n1.ccdf_vector().tolist() if False else [1.0, 0.75, 0.25]) == n1
    assert n1.mean() == pytest.approx(1.0)
    with pytest.raises(DomainError):
        ErasurePmf.from_dict({"q": 2})


@pytest.mark.parametrize(
    "omega,u1,u2", [(1.0, {1}, {2}), (0.25, {1, 2}, set()), (2.0, set(), {1, 2})]
)
def test_partition_example1(ex1, omega, u1, u2):
    p = partition_levels(*ex1, omega)
    assert p.user1_levels == u1 and p.user2_levels == u2


def test_partition_ties_go_to_user2(ex1):
    p = partition_levels(*ex1, 1.5)
    assert 1 in p.user2_levels


def test_partition_negative_weight(ex1):
    with pytest.raises(DomainError):
        partition_levels(*ex1, -1.0)


def test_achievable_rates_examples(ex1, ex2):
    assert achievable_rates(*ex1, LevelPartition({1}, {2})) == (0.75, 0.5)
    assert achievable_rates(*ex1, LevelPartition({1, 2}, set())) == (1.0, 0.0)
    assert achievable_rates(*ex2, LevelPartition(set(), {1, 2})) == (0.0, 1.0)
    with pytest.raises(DomainError):
        achievable_rates(*ex1, LevelPartition({1}, set()))


def test_critical_weights(ex1, ex2):
    assert critical_weights(*ex1) == [0.5, 1.5]
    assert critical_weights(*ex2) == [0.0, 1.5]
    n = ex1[0]
    assert critical_weights(n, n) == [1.0]


def test_capacity_region_examples(ex1, ex2):
    r1 = capacity_region(*ex1)
    assert r1.extreme_points == ((1.0, 0.0), (0.75, 0.5), (0.0, 1.0))
    assert r1.critical_weights == (0.0, 0.5, 1.5)
    r2 = capacity_region(*ex2)
    assert r2.extreme_points == ((0.75, 0.0), (0.75, 0.5), (0.0, 1.0))
    assert r2.critical_weights == (0.0, 0.0, 1.5)


def test_capacity_region_silent_user2(ex1):
    zero = ErasurePmf.point_mass(2, 0)
    r = capacity_region(ex1[0], zero)
    assert r.extreme_points == ((1.0, 0.0),)


def test_enhancement_examples(ex1):
    assert enhance_channel(*ex1, 1.0).ccdf_vector().tolist() == [0.75, 0.5]
    assert enhance_channel(*ex1, 3.0).ccdf_vector().tolist() == [1.0, 1.0]
    zero = ErasurePmf.point_mass(2, 0)
    assert enhance_channel(ex1[0], zero, 2.0) == ex1[0]
    with pytest.raises(DomainError, match="swap"):
        enhance_channel(*ex1, 0.5)


def test_converse_examples(ex1):
    assert converse_weighted_rate(*ex1, 1.0) == 1.25
    assert converse_weighted_rate(*ex1, 2.0) == 2.0


def test_degradedness(ex1):
    n1, n2 = ex1
    assert is_degraded(enhance_channel(n1, n2, 1.2), n2)
    assert not is_degraded(n1, n2)
    assert is_degraded(n1, n1)


@given(pmf_pairs(), st.floats(1, 10))
def test_converse_meets_achievability(pair, omega):
    assert converse_weighted_rate(*pair, omega) == pytest.approx(achievable_weighted_rate(*pair, omega), abs=1e-12)


@given(pmf_pairs(), omegas)
def test_partition_totality(pair, omega):
    p = partition_levels(*pair, omega)
    assert p.user1_levels | p.user2_levels == set(range(1, pair[0].q + 1))
    assert not p.user1_levels & p.user2_levels


@given(pmf_pairs(), st.floats(0.01, 100))
def test_role_reversal(pair, omega):
    n1, n2 = pair
    ties = [n for n in range(1, n1.q + 1) if math.isclose(n1.ccdf(n), omega * n2.ccdf(n), rel_tol=1e-9, abs_tol=1e-15)]
    p = partition_levels(n1, n2, omega)
    r = partition_levels(n2, n1, 1.0 / omega).swapped()
    # tied levels go to user 2 in both calls, so they can only differ there
    assert p.user1_levels ^ r.user1_levels <= set(ties)


@given(pmf_pairs(max_q=6), st.floats(1, 10))
def test_enhancement_dominates(pair, omega):
    n1, n2 = pair
    enh = enhance_channel(n1, n2, omega)
    c = enh.ccdf_vector()
    assert np.all(np.diff(np.concatenate(([1.0], c))) <= 1e-12)
    assert all(enh.ccdf(n) >= n1.ccdf(n) - 1e-15 for n in range(n1.q + 1))
    assert is_degraded(enh, n2)
    base = capacity_region(n1, n2).weighted_max(omega)
    enhanced = capacity_region(enh, n2).weighted_max(omega)
    assert enhanced >= base - 1e-12
    assert enhanced == pytest.approx(converse_weighted_rate(n1, n2, omega), abs=1e-12)


@given(pmf_pairs(max_q=3), omegas)
def test_brute_force_matches_oracle(pair, omega):
    n1, n2 = pair
    expect = erasure_brute_force(n1.pmf, n2.pmf, omega)
    assert brute_force_weighted_rate(n1, n2, omega) == pytest.approx(expect, abs=1e-12)
    assert capacity_region(n1, n2).weighted_max(omega) == pytest.approx(expect, abs=1e-12)


@given(pmf_pairs(max_q=6))
def test_extreme_points_achievable(pair):
    n1, n2 = pair
    region = capacity_region(n1, n2)
    for (lo, hi), pt in zip(region.omega_intervals(), region.extreme_points):
        w = lo + 1.0 if math.isinf(hi) else 0.5 * (lo + hi)
        if hi - lo < 1e-9:
            continue
        got = achievable_rates(n1, n2, partition_levels(n1, n2, w))
        # vertices closer than the hull tolerance may be merged, so compare supports
        assert got[0] + w * got[1] == pytest.approx(pt[0] + w * pt[1], abs=1e-12 * (1 + w))
        assert region.contains(got, tol=1e-12)


# layered erasure identities


def _fair_joint(q, v=1):
    return np.full((v,) + (2,) * q, 1.0 / (v * 2**q))


def test_identity_single_level():
    n = ErasurePmf(1, (0.5, 0.5))
    lhs, rhs = erasure_identity_check(n, _fair_joint(1), "a")
    assert lhs == pytest.approx(0.5, abs=1e-12) and rhs == pytest.approx(0.5, abs=1e-12)


def test_identity_entropy_sum(ex1):
    lhs, rhs = erasure_identity_check(ex1[0], _fair_joint(2), "b")
    assert lhs == pytest.approx(1.0, abs=1e-12) and rhs == pytest.approx(1.0, abs=1e-12)


def test_identity_information_sum(ex1):
    # V = X2 with fair independent bits
    joint = np.zeros((2, 2, 2))
    for v in range(2):
        for x1 in range(2):
            joint[v, x1, v] = 0.25
    lhs, rhs = erasure_identity_check(ex1[1], joint, "c")
    assert lhs == pytest.approx(0.5, abs=1e-12) and rhs == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1), st.sampled_from("abc"))
def test_identities_hold_for_random_tables(q, v, seed, which):
    rng = np.random.default_rng(seed)
    joint = rng.random((v,) + (2,) * q)
    joint /= joint.sum()
    n = random_pmf(rng, q)
    lhs, rhs = erasure_identity_check(n, joint, which)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_identity_size_limit():
    n = ErasurePmf.point_mass(5, 5)
    with pytest.raises(DomainError):
        erasure_identity_check(n, _fair_joint(5), "a")
