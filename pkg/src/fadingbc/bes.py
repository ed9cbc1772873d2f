"""Binary expansion superposition (BES) signaling and its achievable rates.

The transmitter sends X = sqrt(3) * sum_n Xn 2^-n with independent +-1 layers.
After normalizing by the channel gain, a receiver in state s sees
Y = sum_n Xn 2^-n + Z / sqrt(3 s), so layer n has per-layer SNR
a_n(s) = 3 s 4^-n.  Hard detection of each layer gives a binary symmetric
channel whose crossover is bounded by eps_d(a_n(s)), where d counts how many
of the less significant interfering layers have been stripped.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate, optimize

from .core import binary_entropy, g_function, normal_pdf, q_function
from .errors import DomainError, NumericError
from .gaussian import FadingDist
from .regions import RateRegionBoundary

INF_DEPTH = math.inf
TINY_A = 1e-8
GL_DEPTH = 12  # beyond this depth the difference quotient loses digits
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
UNUSED = 0
MAX_LEVEL_CAP = 64
RATE_TOL = 1e-11


# antipodal expansions


@dataclass(frozen=True)
class AntipodalWord:
    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits or any(b not in (-1, 1) for b in self.bits):
            raise DomainError("an antipodal word is a non-empty sequence of +-1")

    @property
    def value(self) -> float:
        return math.fsum(b * 2.0 ** -(j + 1) for j, b in enumerate(self.bits))

    def __len__(self):
        return len(self.bits)


def antipodal_expand(a: float, m: int) -> AntipodalWord:
    """First m digits of the +-1 expansion of a in [-1, 1] (sgn(0) = +1)."""
    if not -1.0 <= a <= 1.0:
        raise DomainError(f"antipodal expansion needs |a| <= 1, got {a}")
    if m < 1:
        raise DomainError("word length must be >= 1")
    bits, r = [], float(a)
    for j in range(1, m + 1):
        b = 1 if r >= 0 else -1
        bits.append(b)
        r -= b * 2.0**-j
    return AntipodalWord(tuple(bits))


def expansion_bits(y: np.ndarray, m: int) -> np.ndarray:
    """Vectorized expansion of clip(y) to m digits; shape (len(y), m)."""
    r = np.clip(np.asarray(y, dtype=float), -1.0, 1.0)
    out = np.empty((r.size, m), dtype=np.int8)
    for j in range(m):
        b = np.where(r >= 0, 1, -1)
        out[:, j] = b
        r = r - b * 2.0 ** -(j + 1)
    return out


def nearest_constellation(y: float, m: int) -> AntipodalWord:
    """Minimum-distance m-digit word for observation y (clipped to [-1, 1])."""
    return antipodal_expand(min(1.0, max(-1.0, float(y))), m)


# crossover probabilities


def _check_depth(d) -> float:
    if d == INF_DEPTH:
        return INF_DEPTH
    if isinstance(d, bool) or int(d) != d or d < 0:
        raise DomainError(f"depth must be a non-negative integer or inf, got {d!r}")
    return int(d)


def _eps_gl(r: np.ndarray, h: float) -> np.ndarray:
    # eps = integral over t in [-1, 1] of Q(r (1 + h t)) dt
    pts = r[:, None] * (1.0 + h * _GL_X[None, :])
    return (q_function(pts.ravel()).reshape(pts.shape) * _GL_W).sum(axis=1)


def epsilon_d(a, d=0):
    """Crossover bound at per-layer SNR a with interference depth d."""
    arr = np.atleast_1d(np.asarray(a, dtype=float))
    scalar = np.ndim(a) == 0
    if np.any(~(arr > 0)) or not np.all(np.isfinite(arr)):
        raise DomainError("epsilon_d needs finite a > 0")
    d = _check_depth(d)
    out = np.ones_like(arr)
    ok = arr >= TINY_A
    r = np.sqrt(arr[ok])
    if d == INF_DEPTH:
        out[ok] = 2.0 * q_function(r)
    elif d <= GL_DEPTH:
        h = 2.0**-d
        out[ok] = (g_function(r * (1 + h)) - g_function(r * (1 - h))) / (r * h)
    else:
        out[ok] = _eps_gl(r, 2.0**-d)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def epsilon_hat(a, d=0):
    return np.minimum(epsilon_d(a, d), 0.5) if np.ndim(a) else min(epsilon_d(a, d), 0.5)


def _deps_da(a: np.ndarray, d) -> np.ndarray:
    r = np.sqrt(a)
    if d == INF_DEPTH:
        der = -2.0 * normal_pdf(r)
    elif d <= GL_DEPTH:
        h = 2.0**-d
        qp, qm = q_function(r * (1 + h)), q_function(r * (1 - h))
        eps = (g_function(r * (1 + h)) - g_function(r * (1 - h))) / (r * h)
        der = (qp + qm - eps) / r + (qp - qm) / (r * h)
    else:
        h = 2.0**-d
        z = 1.0 + h * _GL_X[None, :]
        pts = r[:, None] * z
        der = -(normal_pdf(pts.ravel()).reshape(pts.shape) * z * _GL_W).sum(axis=1)
    return der / (2.0 * r)


@functools.lru_cache(maxsize=None)
def guess_threshold(d=0) -> float:
    """Per-layer SNR at which eps_d equals 1/2; below it the layer is guessed."""
    d = _check_depth(d)
    return optimize.brentq(lambda a: epsilon_d(a, d) - 0.5, 1e-3, 10.0, xtol=1e-15, rtol=1e-15)


def a0() -> float:
    """Root of eps_0(a) = 1/2."""
    return guess_threshold(0)


def layer_snr(s, n: int):
    return 3.0 * np.asarray(s, dtype=float) * 4.0**-n if np.ndim(s) else 3.0 * s * 4.0**-n


def nhat(s: float) -> int:
    """Largest n >= 1 with eps_0(a_n(s)) <= 1/2, or 0 when there is none."""
    if not s >= 0 or math.isinf(s):
        raise DomainError("state must be finite and >= 0")
    if s == 0:
        return 0
    thr = a0() * (1 - 1e-12)
    n = max(int(math.floor(0.5 * math.log2(3.0 * s / a0()))), 0)
    while n >= 1 and layer_snr(s, n) < thr:
        n -= 1
    while layer_snr(s, n + 1) >= thr:
        n += 1
    return n


# level assignments


@dataclass(frozen=True)
class LevelAssignment:
    """User of each level 1..max_level: 1, 2, or 0 for unused."""

    max_level: int
    users: tuple[int, ...]

    def __post_init__(self):
        if self.max_level < 1:
            raise DomainError("max_level must be >= 1")
        if len(self.users) != self.max_level:
            raise DomainError("one user label per level is required")
        if any(u not in (0, 1, 2) for u in self.users):
            raise DomainError("level users must be 1, 2 or 0 (unused)")

    @classmethod
    def from_sets(cls, max_level: int, user1: Iterable[int] = (), user2: Iterable[int] = ()) -> "LevelAssignment":
        u1, u2 = set(user1), set(user2)
        if u1 & u2:
            raise DomainError("a level cannot belong to both users")
        if any(not 1 <= n <= max_level for n in u1 | u2):
            raise DomainError(f"levels must lie in 1..{max_level}")
        return cls(max_level, tuple(1 if n in u1 else 2 if n in u2 else UNUSED for n in range(1, max_level + 1)))

    def user_of(self, n: int) -> int:
        return self.users[n - 1] if 1 <= n <= self.max_level else UNUSED

    def levels_of(self, user: int) -> list[int]:
        return [n for n, u in enumerate(self.users, 1) if u == user]

    def used_levels(self) -> list[int]:
        return [n for n, u in enumerate(self.users, 1) if u != UNUSED]

    def to_dict(self) -> dict:
        names = {1: "user1", 2: "user2", UNUSED: "unused"}
        return {"max_level": self.max_level, "levels": {str(n): names[u] for n, u in enumerate(self.users, 1)}}

    @classmethod
    def from_dict(cls, data: Mapping) -> "LevelAssignment":
        if not isinstance(data, Mapping) or "max_level" not in data or "levels" not in data:
            raise DomainError("assignment JSON needs 'max_level' and 'levels'")
        m = int(data["max_level"])
        codes = {"user1": 1, "user2": 2, "unused": UNUSED}
        users = [UNUSED] * m
        for key, name in data["levels"].items():
            n = int(key)
            if not 1 <= n <= m:
                raise DomainError(f"level {n} outside 1..{m}")
            if name not in codes:
                raise DomainError(f"level {n}: unknown user {name!r}")
            users[n - 1] = codes[name]
        return cls(m, tuple(users))


def depth_of_level(assign: LevelAssignment, n: int):
    """Levels above n that reverse stripping removes before detecting n.

    Counts upward until the first level owned by the other user; unused
    levels carry nothing and are skipped like stripped ones.  Returns inf
    when no other-user level sits above n.
    """
    me = assign.user_of(n)
    if me == UNUSED:
        raise DomainError(f"level {n} is not assigned")
    for m in range(n + 1, assign.max_level + 1):
        u = assign.user_of(m)
        if u != UNUSED and u != me:
            return m - n - 1
    return INF_DEPTH


# rates


@functools.lru_cache(maxsize=1 << 16)
def _gain_kernel(t: float, d) -> float:
    # d/da [1 - H(eps_d(a))] times a, at a = e^t; quad revisits the same nodes across levels
    a = math.exp(t)
    eps = epsilon_d(a, d)
    if eps >= 0.5 or eps <= 0.0:
        return 0.0
    dh = math.log2((1.0 - eps) / eps)
    return -dh * float(_deps_da(np.array([a]), d)[0]) * a


def _level_gain_integrand(S: FadingDist, c: float, d):
    # kernel times Fbar(a / c), in the variable t = log a
    def f(t):
        k = _gain_kernel(t, d)
        return k * S.ccdf(math.exp(t) / c) if k else 0.0

    return f


def _upper_a(d) -> float:
    a = 16.0
    while binary_entropy(min(epsilon_d(a, d), 0.5)) > 1e-13:
        a *= 4.0
        if a > 1e300:
            raise NumericError("entropy tail never becomes negligible", depth=d)
    return a


@functools.lru_cache(maxsize=8192)
def _level_rate_cached(S: FadingDist, n: int, d) -> float:
    c = 3.0 * 4.0**-n
    lo = guess_threshold(d)
    hi = _upper_a(d)
    cuts = sorted({lo, hi} | {c * x for x in S.atoms if lo < c * x < hi})
    f = _level_gain_integrand(S, c, d)
    total = 0.0
    for u, v in zip(cuts[:-1], cuts[1:]):
        res = integrate.quad(f, math.log(u), math.log(v), epsabs=1e-12, epsrel=1e-10, limit=200, full_output=1)
        if len(res) > 3:
            raise NumericError("level-rate quadrature did not converge", level=n, depth=d, lower=u, upper=v, estimate=res[0])
        total += res[0]
    return 2.0 * min(max(total, 0.0), 1.0)


def level_rate(S: FadingDist, n: int, d=0) -> float:
    """2 E[1 - H(eps_hat_d(a_n(S)))], bits per complex channel use."""
    if n < 1:
        raise DomainError("levels start at 1")
    return _level_rate_cached(S, int(n), _check_depth(d))


def achievable_rates(S1: FadingDist, S2: FadingDist, assign: LevelAssignment, stripping: bool = True) -> tuple[float, float]:
    rates = []
    for user, S in ((1, S1), (2, S2)):
        total = 0.0
        for n in assign.levels_of(user):
            total += level_rate(S, n, depth_of_level(assign, n) if stripping else 0)
        rates.append(total)
    return rates[0], rates[1]


def achievable_region(
    S1: FadingDist, S2: FadingDist, assignments: Sequence[LevelAssignment], stripping: bool = True
) -> RateRegionBoundary:
    pts = [achievable_rates(S1, S2, a, stripping) for a in assignments] or [(0.0, 0.0)]
    return RateRegionBoundary.from_points(pts)


def useful_levels(S: FadingDist) -> int:
    """Number of levels that can carry more than ~1e-11 bits for this law."""
    thr = guess_threshold(INF_DEPTH)
    for n in range(1, MAX_LEVEL_CAP + 1):
        if S.ccdf(thr * 4.0**n / 3.0) < RATE_TOL:
            return n - 1
    return MAX_LEVEL_CAP


def default_max_level(S1: FadingDist, S2: FadingDist) -> int:
    return max(1, useful_levels(S1), useful_levels(S2))


ASSIGNMENT_STYLES = ("threshold", "awgn_rayleigh_inner1", "awgn_rayleigh_inner2")


def example_assignments(
    S1: FadingDist, S2: FadingDist, style: str = "threshold", max_level: int | None = None
) -> list[LevelAssignment]:
    """Families of assignments swept over the user-2 threshold n2.

    threshold: user 2 gets 1..n2, user 1 the rest.
    awgn_rayleigh_inner1: user 1 gets n2+1..n1* where n1* = nhat(s1*); user 2
        gets 1..n2 and every level above n1*.
    awgn_rayleigh_inner2: as inner1 but the levels above n1* stay unused.
    """
    if style not in ASSIGNMENT_STYLES:
        raise DomainError(f"unknown assignment style {style!r}; expected one of {ASSIGNMENT_STYLES}")
    m = max_level or default_max_level(S1, S2)
    if style == "threshold":
        return [LevelAssignment.from_sets(m, range(n2 + 1, m + 1), range(1, n2 + 1)) for n2 in range(m + 1)]
    if S1.kind != "intermittent":
        raise DomainError(f"style {style!r} needs an intermittent user-1 channel, got {S1.kind!r}")
    n1 = nhat(S1.params["snr"])
    if n1 < 1:
        raise DomainError("user-1 peak SNR is too weak for any level")
    m = max(m, n1 + 1)
    out = []
    for n2 in range(n1 + 1):
        high = range(n1 + 1, m + 1) if style == "awgn_rayleigh_inner1" else ()
        out.append(LevelAssignment.from_sets(m, range(n2 + 1, n1 + 1), list(range(1, n2 + 1)) + list(high)))
    return out


def single_user_rate(s: float, levels: int | None = None) -> float:
    """All levels to one user with constant state s and full stripping."""
    m = levels or max(nhat(s) + 6, 1)
    if s <= 0:
        return 0.0
    a = 3.0 * s * 4.0 ** -np.arange(1, m + 1, dtype=float)
    return float(2.0 * np.sum(1.0 - binary_entropy(np.minimum(epsilon_d(a, INF_DEPTH), 0.5))))
