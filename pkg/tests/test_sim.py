import math

import numpy as np
import pytest

from conftest import random_pmf
from fadingbc import bes
from fadingbc.erasure import ErasurePmf, LevelPartition, achievable_rates
from fadingbc.errors import DomainError
from fadingbc.gaussian import FadingDist
from fadingbc.sim import SimReport, simulate_bes_detector, simulate_bes_link, simulate_erasure_scheme


def _state(a, n):
    return a * 4.0**n / 3.0


def test_report_validation():
    with pytest.raises(DomainError):
        SimReport(0, 0.1, 0.0, 0)
    with pytest.raises(DomainError):
        SimReport(10, 0.1, -1.0, 0)
    r = SimReport(10, 0.5, 0.1, 3, {"k": 1})
    assert r.within(0.6) and not r.within(0.7)
    assert '"seed": 3' in r.to_json()


def test_erasure_example1(ex1):
    r1, r2 = simulate_erasure_scheme(*ex1, LevelPartition({1}, {2}), 10**5, seed=1)
    assert r1.within(0.75) and r2.within(0.5)


def test_erasure_deterministic_user():
    n = ErasurePmf.point_mass(3, 3)
    r1, r2 = simulate_erasure_scheme(n, n, LevelPartition({1, 2, 3}, set()), 10**4, seed=0)
    assert r1.estimate == 3.0 and r1.half_width_95 == 0.0
    assert r2.estimate == 0.0


def test_erasure_random_q6():
    rng = np.random.default_rng(8)
    n1, n2 = random_pmf(rng, 6), random_pmf(rng, 6)
    part = LevelPartition({1, 4, 5}, {2, 3, 6})
    r1, r2 = simulate_erasure_scheme(n1, n2, part, 2 * 10**5, seed=4)
    e1, e2 = achievable_rates(n1, n2, part)
    assert r1.within(e1) and r2.within(e2)


def test_erasure_half_width_scaling(ex1):
    part = LevelPartition({1}, {2})
    small = simulate_erasure_scheme(*ex1, part, 50_000, seed=2)[0].half_width_95
    big = simulate_erasure_scheme(*ex1, part, 200_000, seed=2)[0].half_width_95
    assert big / small == pytest.approx(0.5, rel=0.05)


def test_erasure_thread_invariance(ex1):
    part = LevelPartition({1}, {2})
    a = simulate_erasure_scheme(*ex1, part, 200_000, seed=9, threads=1)
    b = simulate_erasure_scheme(*ex1, part, 200_000, seed=9, threads=4)
    assert a == b


def test_erasure_input_checks(ex1):
    with pytest.raises(DomainError):
        simulate_erasure_scheme(*ex1, LevelPartition({1}, {2}), 100)
    with pytest.raises(DomainError):
        simulate_erasure_scheme(*ex1, LevelPartition({1}, set()), 10**4)
    with pytest.raises(DomainError):
        simulate_erasure_scheme(*ex1, LevelPartition({1}, {2}), 10**4, seed=-1)


CELLS = [(a, n, d) for a in (0.5405, 1.0, 4.0) for n in (1, 2, 4) for d in (0, 1, bes.INF_DEPTH)]


@pytest.mark.parametrize("a,n,d", CELLS)
def test_detector_matrix(a, n, d):
    r = simulate_bes_detector(_state(a, n), n, d, 10**5, seed=n)
    eps = bes.epsilon_d(a, d)
    assert r.within(eps)
    assert r.metadata["word_error"] <= eps + 3 * r.metadata["word_error_half_width"] / 1.96 + 1e-12


def test_detector_determinism():
    a = simulate_bes_detector(_state(1.0, 3), 3, 1, 10**5, seed=7)
    b = simulate_bes_detector(_state(1.0, 3), 3, 1, 10**5, seed=7, threads=3)
    assert a.to_json() == b.to_json()
    c = simulate_bes_detector(_state(1.0, 3), 3, 1, 10**5, seed=8)
    assert c.estimate != a.estimate


def test_detector_input_checks():
    with pytest.raises(DomainError):
        simulate_bes_detector(1.0, 1, 0, 10**3)
    with pytest.raises(DomainError):
        simulate_bes_detector(0.0, 1, 0, 10**5)
    with pytest.raises(DomainError):
        simulate_bes_detector(1.0, 1, -2, 10**5)


def test_link_constant_state_single_user():
    s, m = 300.0, 6
    assign = bes.LevelAssignment.from_sets(m, range(1, m + 1))
    out = simulate_bes_link(FadingDist.intermittent(1.0, s), assign, 1, True, 10**5, seed=3)
    for n, r in out.items():
        bound = bes.epsilon_hat(bes.layer_snr(s, n), bes.INF_DEPTH)
        assert r.metadata["bound"] == pytest.approx(bound)
        assert r.estimate <= bound + 3 * r.half_width_95 / 1.96 + 1e-12


def test_link_dead_channel_guesses():
    assign = bes.LevelAssignment.from_sets(3, [1, 2, 3])
    out = simulate_bes_link(FadingDist.zero(), assign, 1, True, 10**5, seed=0)
    for r in out.values():
        assert r.within(0.5)


def test_link_intermittent_no_stripping():
    S1 = FadingDist.intermittent(0.5, 1e3)
    assign = bes.LevelAssignment.from_sets(6, [4, 5, 6], [1, 2, 3])
    out = simulate_bes_link(S1, assign, 1, False, 10**5, seed=2)
    assert sorted(out) == [4, 5, 6]
    for r in out.values():
        assert r.estimate <= r.metadata["bound"] + 3 * r.half_width_95 / 1.96 + 1e-12
    assert simulate_bes_link(S1, bes.LevelAssignment.from_sets(2, [1]), 2, True, 10**5) == {}


def test_link_rayleigh_with_stripping():
    S = FadingDist.rayleigh(500.0)
    assign = bes.LevelAssignment.from_sets(6, [1, 2, 5, 6], [3, 4])
    out = simulate_bes_link(S, assign, 1, True, 10**5, seed=5)
    depths = {1: 1, 2: 0, 5: "inf", 6: "inf"}
    for n, r in out.items():
        assert r.metadata["depth"] == depths[n]
        assert r.estimate <= r.metadata["bound"] + 3 * r.half_width_95 / 1.96 + 1e-12
        assert math.isfinite(r.estimate)
