"""Capacity region of the two-user q-bit layered erasure broadcast channel.

A receiver in state N sees the N most significant of q transmitted bits.
Level n is worth Fbar_{N1}(n) bits per symbol to user 1 and Fbar_{N2}(n) to
user 2, and the greedy rule that gives each level to whichever user values it
more (after weighting user 2 by omega) is optimal.  The converse runs through
an enhanced, degraded channel; both routes are implemented separately so they
can be checked against each other.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError
from .regions import RateRegionBoundary

PMF_TOL = 1e-12


@dataclass(frozen=True)
class ErasurePmf:
    """Distribution of the number of unerased levels, on {0, ..., q}."""

    q: int
    pmf: tuple[float, ...]
    _ccdf: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 1:
            raise DomainError(f"q must be a positive integer, got {self.q!r}")
        pmf = tuple(float(p) for p in self.pmf)
        if len(pmf) != self.q + 1:
            raise DomainError(f"pmf needs q+1={self.q + 1} entries, got {len(pmf)}")
        if any(p < 0 or not math.isfinite(p) for p in pmf):
            raise DomainError("pmf entries must be finite and non-negative")
        if abs(math.fsum(pmf) - 1.0) > PMF_TOL:
            raise DomainError(f"pmf sums to {math.fsum(pmf)!r}, not 1")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "pmf", pmf)
        tail = [0.0] * (self.q + 2)
        for n in range(self.q, -1, -1):
            tail[n] = tail[n + 1] + pmf[n]
        tail[0] = 1.0
        object.__setattr__(self, "_ccdf", tuple(min(t, 1.0) for t in tail))

    @classmethod
    def from_ccdf(cls, ccdf) -> "ErasurePmf":
        """Build from Fbar(0..q); Fbar(0) must be 1 and the sequence non-increasing."""
        c = [float(x) for x in ccdf]
        if abs(c[0] - 1.0) > PMF_TOL:
            raise DomainError("a ccdf must start at 1")
        if any(b > a + PMF_TOL for a, b in zip(c, c[1:])):
            raise DomainError("a ccdf must be non-increasing")
        c.append(0.0)
        pmf = [max(c[n] - c[n + 1], 0.0) for n in range(len(c) - 1)]
        s = math.fsum(pmf)
        return cls(len(pmf) - 1, tuple(p / s for p in pmf))

    @classmethod
    def point_mass(cls, q: int, n: int) -> "ErasurePmf":
        pmf = [0.0] * (q + 1)
        pmf[n] = 1.0
        return cls(q, tuple(pmf))

    def ccdf(self, n: int) -> float:
        if not 0 <= n <= self.q + 1:
            raise DomainError(f"level {n} outside 0..{self.q + 1}")
        return self._ccdf[n]

    def ccdf_vector(self) -> np.ndarray:
        """Fbar(1), ..., Fbar(q)."""
        return np.array(self._ccdf[1 : self.q + 1])

    def mean(self) -> float:
        return math.fsum(self._ccdf[1 : self.q + 1])

    def to_dict(self) -> dict:
        return {"q": self.q, "pmf": list(self.pmf)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "ErasurePmf":
        if not isinstance(data, Mapping) or "q" not in data or "pmf" not in data:
            raise DomainError("ErasurePmf JSON needs fields 'q' and 'pmf'")
        return cls(int(data["q"]), tuple(data["pmf"]))


@dataclass(frozen=True)
class LevelPartition:
    user1_levels: frozenset[int]
    user2_levels: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "user1_levels", frozenset(self.user1_levels))
        object.__setattr__(self, "user2_levels", frozenset(self.user2_levels))
        if self.user1_levels & self.user2_levels:
            raise DomainError("a level cannot belong to both users")

    def validate(self, q: int) -> None:
        if self.user1_levels | self.user2_levels != set(range(1, q + 1)):
            raise DomainError(f"partition does not cover levels 1..{q}")

    def swapped(self) -> "LevelPartition":
        return LevelPartition(self.user2_levels, self.user1_levels)


def _same_q(n1: ErasurePmf, n2: ErasurePmf) -> int:
    if n1.q != n2.q:
        raise DomainError(f"channels have different depths q={n1.q} and q={n2.q}")
    return n1.q


def partition_levels(n1: ErasurePmf, n2: ErasurePmf, omega: float) -> LevelPartition:
    """Greedy level assignment; ties Fbar1 = omega Fbar2 go to user 2."""
    if not omega >= 0:
        raise DomainError("omega must be >= 0")
    q = _same_q(n1, n2)
    u1 = {n for n in range(1, q + 1) if n1.ccdf(n) > omega * n2.ccdf(n)}
    return LevelPartition(frozenset(u1), frozenset(range(1, q + 1)) - u1)


def achievable_rates(n1: ErasurePmf, n2: ErasurePmf, partition: LevelPartition) -> tuple[float, float]:
    q = _same_q(n1, n2)
    partition.validate(q)
    r1 = math.fsum(n1.ccdf(n) for n in partition.user1_levels)
    r2 = math.fsum(n2.ccdf(n) for n in partition.user2_levels)
    return r1, r2


def critical_weights(n1: ErasurePmf, n2: ErasurePmf) -> list[float]:
    """Sorted distinct ratios Fbar1(j) / Fbar2(j) over levels with Fbar2(j) > 0."""
    q = _same_q(n1, n2)
    ratios = sorted(n1.ccdf(j) / n2.ccdf(j) for j in range(1, q + 1) if n2.ccdf(j) > 0)
    out: list[float] = []
    for r in ratios:
        if not out or r - out[-1] > PMF_TOL * max(1.0, r):
            out.append(r)
    return out


def capacity_region(n1: ErasurePmf, n2: ErasurePmf) -> RateRegionBoundary:
    q = _same_q(n1, n2)
    ws = critical_weights(n1, n2)
    # omega = 0: every level to user 1
    points = [achievable_rates(n1, n2, LevelPartition(frozenset(range(1, q + 1)), frozenset()))]
    for lo, hi in zip(ws, ws[1:] + [None]):
        omega = lo + 1.0 if hi is None else 0.5 * (lo + hi)
        points.append(achievable_rates(n1, n2, partition_levels(n1, n2, omega)))
    return RateRegionBoundary.from_points(points)


def enhance_channel(n1: ErasurePmf, n2: ErasurePmf, omega: float) -> ErasurePmf:
    """Stochastically enlarge N1 so that (N1~, N2) is degraded."""
    if not omega >= 1:
        raise DomainError(
            "enhancement needs omega >= 1; for omega < 1 swap the users and use 1/omega"
        )
    q = _same_q(n1, n2)
    c = [min(1.0, max(n1.ccdf(n), omega * n2.ccdf(n))) for n in range(q + 1)]
    return ErasurePmf.from_ccdf(c)


def converse_weighted_rate(n1: ErasurePmf, n2: ErasurePmf, omega: float) -> float:
    """Upper bound on R1 + omega R2 from the enhanced degraded channel."""
    enhanced = enhance_channel(n1, n2, omega)
    q = n1.q
    b = [enhanced.ccdf(n) - omega * n2.ccdf(n) for n in range(1, q + 1)]
    return math.fsum(x for x in b if x > 0) + omega * math.fsum(n2.ccdf(n) for n in range(1, q + 1))


def achievable_weighted_rate(n1: ErasurePmf, n2: ErasurePmf, omega: float) -> float:
    r1, r2 = achievable_rates(n1, n2, partition_levels(n1, n2, omega))
    return r1 + omega * r2


def brute_force_weighted_rate(n1: ErasurePmf, n2: ErasurePmf, omega: float) -> float:
    """Maximum of R1 + omega R2 over all 2^q level assignments."""
    q = _same_q(n1, n2)
    if q > 16:
        raise DomainError("exhaustive search limited to q <= 16")
    best = -math.inf
    for mask in itertools.product((1, 2), repeat=q):
        u1 = frozenset(n + 1 for n, u in enumerate(mask) if u == 1)
        r1, r2 = achievable_rates(n1, n2, LevelPartition(u1, frozenset(range(1, q + 1)) - u1))
        best = max(best, r1 + omega * r2)
    return best


def is_degraded(n1: ErasurePmf, n2: ErasurePmf) -> bool:
    """True when N1 is stochastically larger than N2."""
    q = _same_q(n1, n2)
    return all(n1.ccdf(n) >= n2.ccdf(n) for n in range(q + 1))


# Entropy identities of the layered erasure channel, by exhaustive enumeration.


def _entropy(dist: Mapping) -> float:
    return -math.fsum(p * math.log2(p) for p in dist.values() if p > 0)


def _marginal(joint, key) -> dict:
    out: dict = defaultdict(float)
    for outcome, p in joint:
        out[key(outcome)] += p
    return out


def _cond_entropy(joint, target, given) -> float:
    return _entropy(_marginal(joint, lambda o: (target(o), given(o)))) - _entropy(_marginal(joint, given))


def _cond_mi(joint, a, b, given) -> float:
    return (
        _cond_entropy(joint, a, given)
        - _cond_entropy(joint, a, lambda o: (b(o), given(o)))
    )


def erasure_identity_check(n: ErasurePmf, joint: np.ndarray, which: str) -> tuple[float, float]:
    """Evaluate both sides of one of the three layered-erasure identities.

    ``joint`` has shape (|V|, 2, ..., 2) with q binary axes and holds the
    distribution of (V, X_1, ..., X_q).  ``which`` selects:

    * ``"a"``: I(X^q; X^N | V)  vs  H(X^N | V, N)
    * ``"b"``: H(X^N | V, N)  vs  sum_n Fbar(n) H(X_n | X^{n-1}, V)
    * ``"c"``: I(V; X^N)  vs  sum_n Fbar(n) I(V; X_n | X^{n-1})
    """
    joint = np.asarray(joint, dtype=float)
    q = n.q
    if q > 4 or joint.ndim != q + 1 or joint.shape[0] > 4 or joint.shape[1:] != (2,) * q:
        raise DomainError("identity check needs q <= 4, |V| <= 4 and joint shape (|V|, 2, ..., 2)")
    if abs(joint.sum() - 1.0) > 1e-12 or np.any(joint < 0):
        raise DomainError("joint must be a probability table")
    if which not in ("a", "b", "c"):
        raise DomainError(f"unknown identity {which!r}")

    # outcomes are (v, x, state) with x a q-tuple of bits
    full = []
    for idx in itertools.product(*(range(k) for k in joint.shape)):
        pvx = joint[idx]
        if pvx == 0:
            continue
        for state in range(q + 1):
            ps = n.pmf[state]
            if ps > 0:
                full.append(((idx[0], idx[1:], state), pvx * ps))

    V = lambda o: o[0]
    X = lambda o: o[1]
    N = lambda o: o[2]
    Y = lambda o: (o[2], o[1][: o[2]])  # receiver sees the prefix and, implicitly, its length
    nothing = lambda o: ()

    def level_terms(term):
        return math.fsum(n.ccdf(k) * term(k) for k in range(1, q + 1))

    def h_level(k):
        return _cond_entropy(full, lambda o: o[1][k - 1], lambda o: (o[1][: k - 1], o[0]))

    def i_level(k):
        return _cond_mi(full, V, lambda o: o[1][k - 1], lambda o: o[1][: k - 1])

    h_y_given_vn = _cond_entropy(full, Y, lambda o: (V(o), N(o)))
    if which == "a":
        return _cond_mi(full, X, Y, V), h_y_given_vn
    if which == "b":
        return h_y_given_vn, level_terms(h_level)
    return _cond_mi(full, V, Y, nothing), level_terms(i_level)
