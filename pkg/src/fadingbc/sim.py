"""Monte Carlo checks of the erasure scheme and the BES layer detector.

Randomness is keyed per block: block k of a run with seed s draws from
SeedSequence(s, spawn_key=(k,)), so results do not depend on how blocks are
spread over worker threads.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import bes
from .erasure import ErasurePmf, LevelPartition
from .errors import DomainError
from .gaussian import FadingDist

BLOCK = 1 << 16
Z95 = 1.96


@dataclass(frozen=True)
class SimReport:
    trials: int
    estimate: float
    half_width_95: float
    seed: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials <= 0:
            raise DomainError("a report needs at least one trial")
        if not self.half_width_95 >= 0:
            raise DomainError("half width must be >= 0")

    def within(self, target: float, k: float = 3.0 / Z95) -> bool:
        """|estimate - target| <= k half-widths (default: 3 standard errors)."""
        return abs(self.estimate - target) <= k * self.half_width_95 + 1e-15

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _Moments:
    """Running sums that merge associatively across blocks."""

    def __init__(self, width: int):
        self.n = 0
        self.s = np.zeros(width)
        self.ss = np.zeros(width)

    def add(self, n: int, s: np.ndarray, ss: np.ndarray) -> None:
        self.n += n
        self.s += s
        self.ss += ss

    def mean(self) -> np.ndarray:
        return self.s / self.n

    def half_width(self) -> np.ndarray:
        m = self.mean()
        var = np.maximum(self.ss / self.n - m * m, 0.0) * self.n / max(self.n - 1, 1)
        return Z95 * np.sqrt(var / self.n)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _run_blocks(total: int, seed: int, threads: int, body: Callable[[np.random.Generator, int], list]) -> list:
    """Evaluate body(rng, size) on each block, in block order."""
    sizes = [BLOCK] * (total // BLOCK) + ([total % BLOCK] if total % BLOCK else [])

    def one(k):
        return body(_block_rng(seed, k), sizes[k])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(len(sizes))))
    return [one(k) for k in range(len(sizes))]


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
        raise DomainError("seed must be an integer in [0, 2^64)")
    return int(seed)


def simulate_erasure_scheme(
    N1: ErasurePmf,
    N2: ErasurePmf,
    partition: LevelPartition,
    symbols: int = 10**6,
    seed: int = 0,
    threads: int = 1,
) -> tuple[SimReport, SimReport]:
    """Bits per symbol delivered to each user under a level partition."""
    if symbols < 10**4:
        raise DomainError("use at least 10^4 symbols")
    seed = _check_seed(seed)
    q = N1.q
    partition.validate(q)
    mask1 = np.zeros(q + 1)
    mask2 = np.zeros(q + 1)
    for n in partition.user1_levels:
        mask1[n] = 1
    for n in partition.user2_levels:
        mask2[n] = 1
    # delivered bits for state N: count of own levels n <= N
    got1, got2 = np.cumsum(mask1), np.cumsum(mask2)
    p1, p2 = np.asarray(N1.pmf), np.asarray(N2.pmf)

    def body(rng, size):
        s1 = rng.choice(q + 1, size=size, p=p1)
        s2 = rng.choice(q + 1, size=size, p=p2)
        x = np.stack([got1[s1], got2[s2]])
        return size, x.sum(axis=1), (x * x).sum(axis=1)

    acc = _Moments(2)
    for part in _run_blocks(symbols, seed, threads, body):
        acc.add(*part)
    mean, hw = acc.mean(), acc.half_width()
    meta = {"scenario": "erasure", "partition": [sorted(partition.user1_levels), sorted(partition.user2_levels)]}
    return tuple(
        SimReport(symbols, float(mean[i]), float(hw[i]), seed, {**meta, "user": i + 1}) for i in range(2)
    )


def _interference(rng, size: int, n: int, d) -> np.ndarray:
    if d == bes.INF_DEPTH:
        return np.zeros(size)
    w = 2.0 ** -(n + d)
    return rng.uniform(-w, w, size)


def simulate_bes_detector(
    s: float, n: int, d=0, trials: int = 10**6, seed: int = 0, threads: int = 1
) -> SimReport:
    """Layer-n detection in state s with uniform interference at depth d.

    ``estimate`` is the frequency of |Y - x^n| >= 2^-n, whose probability is
    exactly eps_d(a_n(s)).  The metadata also carries the word error of the
    minimum-distance detector and the layer-n bit error after guessing.
    """
    if trials < 10**5:
        raise DomainError("use at least 10^5 trials")
    if not (s > 0 and math.isfinite(s)):
        raise DomainError("state must be finite and > 0")
    if n < 1:
        raise DomainError("levels start at 1")
    d = bes._check_depth(d)
    seed = _check_seed(seed)
    a = bes.layer_snr(s, n)
    guess = bes.epsilon_d(a, d) > 0.5
    sigma = 1.0 / math.sqrt(3.0 * s)
    weights = 2.0 ** -np.arange(1, n + 1)

    def body(rng, size):
        bits = rng.choice(np.array([-1, 1], dtype=np.int8), size=(size, n))
        xn = bits @ weights
        y = xn + _interference(rng, size, n, d) + sigma * rng.standard_normal(size)
        strict = np.abs(y - xn) >= 2.0**-n
        det = bes.expansion_bits(y, n)
        word = np.any(det != bits, axis=1)
        layer = det[:, -1] if not guess else rng.choice(np.array([-1, 1], dtype=np.int8), size)
        bit = layer != bits[:, -1]
        x = np.stack([strict, word, bit]).astype(float)
        return size, x.sum(axis=1), x.sum(axis=1)

    acc = _Moments(3)
    for part in _run_blocks(trials, seed, threads, body):
        acc.add(*part)
    mean, hw = acc.mean(), acc.half_width()
    meta = {
        "scenario": "detector",
        "s": s,
        "level": n,
        "depth": "inf" if d == bes.INF_DEPTH else d,
        "a": a,
        "epsilon": bes.epsilon_d(a, d),
        "word_error": float(mean[1]),
        "word_error_half_width": float(hw[1]),
        "bit_error": float(mean[2]),
        "bit_error_half_width": float(hw[2]),
        "guessing": bool(guess),
    }
    return SimReport(trials, float(mean[0]), float(hw[0]), seed, meta)


def simulate_bes_link(
    S: FadingDist,
    assign: bes.LevelAssignment,
    user: int,
    stripping: bool = True,
    symbols: int = 10**5,
    seed: int = 0,
    threads: int = 1,
) -> dict[int, SimReport]:
    """Per-level bit error of one receiver over the full superposition.

    Every used level carries a random +-1 symbol.  With stripping, the
    receiver removes its own less significant levels (genie-aided) before
    detecting each level; a level is guessed when its crossover bound at the
    applicable depth exceeds 1/2.  Each report's metadata carries the
    sample-averaged bound mean(eps_hat_d(a_n(S))).
    """
    if user not in (1, 2):
        raise DomainError("user must be 1 or 2")
    if symbols < 10**5:
        raise DomainError("use at least 10^5 symbols")
    seed = _check_seed(seed)
    mine = assign.levels_of(user)
    if not mine:
        return {}
    m = assign.max_level
    used = np.array([assign.user_of(k) != bes.UNUSED for k in range(1, m + 1)], dtype=float)
    own = np.array([assign.user_of(k) == user for k in range(1, m + 1)], dtype=float)
    scale = 2.0 ** -np.arange(1, m + 1)
    depth = {n: (bes.depth_of_level(assign, n) if stripping else 0) for n in mine}

    def body(rng, size):
        s = S.sample(rng, size)
        bits = rng.choice(np.array([-1, 1], dtype=np.int8), size=(size, m)).astype(float)
        x = (bits * used) @ scale
        with np.errstate(divide="ignore"):
            sigma = np.where(s > 0, 1.0 / np.sqrt(3.0 * np.maximum(s, 1e-300)), np.inf)
        noise = rng.standard_normal(size)
        y = x + np.where(np.isfinite(sigma), sigma * noise, 0.0)
        dead = ~np.isfinite(sigma)
        errs, bounds = [], []
        for n in mine:
            resid = y
            if stripping:
                above = np.zeros(m)
                above[n:] = own[n:]
                resid = y - (bits * above) @ scale
            det = bes.expansion_bits(resid, n)[:, -1]
            a = np.where(dead, 0.0, 3.0 * s * 4.0**-n)
            eps = np.full(size, 1.0)
            pos = a > 0
            if pos.any():
                eps[pos] = bes.epsilon_d(a[pos], depth[n])
            guess = (eps > 0.5) | dead
            coin = rng.choice(np.array([-1, 1], dtype=np.int8), size)
            est = np.where(guess, coin, det)
            errs.append(est != bits[:, n - 1])
            bounds.append(np.minimum(eps, 0.5))
        e = np.stack(errs).astype(float)
        b = np.stack(bounds)
        return size, e.sum(axis=1), e.sum(axis=1), b.sum(axis=1)

    acc = _Moments(len(mine))
    bsum = np.zeros(len(mine))
    for size, s1, s2, bs in _run_blocks(symbols, seed, threads, body):
        acc.add(size, s1, s2)
        bsum += bs
    mean, hw = acc.mean(), acc.half_width()
    out = {}
    for k, n in enumerate(mine):
        d = depth[n]
        out[n] = SimReport(
            symbols,
            float(mean[k]),
            float(hw[k]),
            seed,
            {
                "scenario": "link",
                "user": user,
                "level": n,
                "depth": "inf" if d == bes.INF_DEPTH else d,
                "stripping": stripping,
                "bound": float(bsum[k] / symbols),
            },
        )
    return out
