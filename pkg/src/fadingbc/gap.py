"""Constant-gap analysis on a 6 dB state quantization.

States are quantized to gamma_n = gamma 4^(n-1).  Both the outer bound and the
BES inner bound reduce to sums of Fbar_i(gamma_n) over the same index sets,
so their difference is bounded by

    Delta(gamma) = log2(1 + gamma) + 2 sum_{m>=0} H(eps_hat_0(3 gamma 4^(m-1)))

for every pair of fading laws.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from . import bes
from .core import binary_entropy
from .errors import DomainError, NumericError
from .gaussian import FadingDist, RatePoint, default_weights

SERIES_TOL = 1e-12
MAX_TERMS = 400
GRID_TAIL = 1e-9
DEFAULT_GAMMA = 5.65


@dataclass(frozen=True)
class QuantizationGrid:
    gamma: float
    max_n: int = 40

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError("gamma must be finite and > 0")
        if self.max_n < 1:
            raise DomainError("max_n must be >= 1")

    @property
    def levels(self) -> np.ndarray:
        """gamma_1, ..., gamma_max_n."""
        return self.gamma * 4.0 ** np.arange(self.max_n)

    def state(self, n: int) -> float:
        return self.gamma * 4.0 ** (n - 1)

    def capacity_increment(self, n: int) -> float:
        """log2(1 + gamma_{n+1}) - log2(1 + gamma_n); never exceeds 2."""
        return math.log2((1.0 + self.state(n + 1)) / (1.0 + self.state(n)))

    @classmethod
    def for_pair(cls, gamma: float, S1: FadingDist, S2: FadingDist, cap: int = 64) -> "QuantizationGrid":
        """Smallest grid past which both ccdfs are below 1e-9."""
        for n in range(1, cap + 1):
            g = gamma * 4.0 ** (n - 1)
            if S1.ccdf(g) < GRID_TAIL and S2.ccdf(g) < GRID_TAIL:
                return cls(gamma, max(n - 1, 1))
        return cls(gamma, cap)


def _entropy_terms(gamma: float, count: int) -> np.ndarray:
    a = 3.0 * gamma * 4.0 ** (np.arange(count) - 1.0)
    return binary_entropy(np.minimum(bes.epsilon_d(a, 0), 0.5))


def gap_series(gamma: float, terms: int | None = None) -> float:
    """sum_{m>=0} H(eps_hat_0(3 gamma_m)) with gamma_m = gamma 4^(m-1)."""
    if not (gamma > 0 and math.isfinite(gamma)):
        raise DomainError("gamma must be finite and > 0")
    if terms is None:
        # the terms shrink roughly by half per index, so sum until negligible
        count = 32
        while True:
            h = _entropy_terms(gamma, count)
            if h[-1] < SERIES_TOL:
                return math.fsum(h)
            count *= 2
            if count > MAX_TERMS:
                raise NumericError("entropy series did not converge", gamma=gamma, last_term=float(h[-1]))
    if terms < 1:
        raise DomainError("terms must be >= 1")
    h = _entropy_terms(gamma, terms)
    if h[-1] > GRID_TAIL:
        raise NumericError("too few terms for the entropy series", gamma=gamma, terms=terms, last_term=float(h[-1]))
    return math.fsum(h)


def universal_gap(gamma: float, terms: int | None = None) -> float:
    return math.log2(1.0 + gamma) + 2.0 * gap_series(gamma, terms)


def minimize_gap(lo: float = 0.5, hi: float = 50.0) -> tuple[float, float]:
    """Grid scan in log(gamma) followed by bounded Brent refinement."""
    if not 0 < lo <= hi:
        raise DomainError("need 0 < lo <= hi")
    if lo == hi:
        return lo, universal_gap(lo)
    grid = np.geomspace(lo, hi, 121)
    vals = np.array([universal_gap(g) for g in grid])
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(
        lambda t: universal_gap(math.exp(t)), bounds=(math.log(a), math.log(b)), method="bounded", options={"xatol": 1e-8}
    )
    g = float(math.exp(res.x))
    best = universal_gap(g)
    if vals[k] < best:
        return float(grid[k]), float(vals[k])
    return g, best


def quantized_sets(S1: FadingDist, S2: FadingDist, omega: float, grid: QuantizationGrid) -> tuple[list[int], list[int]]:
    """N1 = {n : Fbar1(gamma_n) > omega Fbar2(gamma_n)}; the rest, ties included, is N2."""
    if not omega >= 0:
        raise DomainError("omega must be >= 0")
    f1, f2 = S1.ccdf(grid.levels), S2.ccdf(grid.levels)
    one = f1 > omega * f2
    n = np.arange(1, grid.max_n + 1)
    return n[one].tolist(), n[~one].tolist()


def quantized_outer(S1: FadingDist, S2: FadingDist, omega: float, grid: QuantizationGrid) -> RatePoint:
    n1, n2 = quantized_sets(S1, S2, omega, grid)
    base = math.log2(1.0 + grid.gamma)
    r1 = base + 2.0 * math.fsum(S1.ccdf(grid.state(n)) for n in n1)
    r2 = base + 2.0 * math.fsum(S2.ccdf(grid.state(n)) for n in n2)
    return RatePoint(r1, r2, omega)


def quantized_inner(S1: FadingDist, S2: FadingDist, omega: float, grid: QuantizationGrid) -> RatePoint:
    """Guaranteed BES rates (no stripping) for the level sets N_i(omega), floored at 0."""
    n1, n2 = quantized_sets(S1, S2, omega, grid)
    loss = 2.0 * gap_series(grid.gamma)
    r1 = 2.0 * math.fsum(S1.ccdf(grid.state(n)) for n in n1) - loss
    r2 = 2.0 * math.fsum(S2.ccdf(grid.state(n)) for n in n2) - loss
    return RatePoint(max(r1, 0.0), max(r2, 0.0), omega)


def quantized_assignment(S1: FadingDist, S2: FadingDist, omega: float, grid: QuantizationGrid) -> bes.LevelAssignment:
    """BES level assignment induced by the quantized sets (level n <-> gamma_n)."""
    n1, n2 = quantized_sets(S1, S2, omega, grid)
    return bes.LevelAssignment.from_sets(grid.max_n, n1, n2)


@dataclass
class GapReport:
    gamma: float
    delta_universal: float
    per_omega: list[dict] = field(default_factory=list)

    @property
    def max_gap(self) -> tuple[float, float]:
        if not self.per_omega:
            return (0.0, 0.0)
        return tuple(max(row["gap"][i] for row in self.per_omega) for i in (0, 1))

    @property
    def max_bes_gap(self) -> tuple[float, float]:
        if not self.per_omega:
            return (0.0, 0.0)
        return tuple(max(row["bes_gap"][i] for row in self.per_omega) for i in (0, 1))

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "delta_universal": self.delta_universal,
            "per_omega": self.per_omega,
            "max_gap": list(self.max_gap),
            "max_bes_gap": list(self.max_bes_gap),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "GapReport":
        for key in ("gamma", "delta_universal", "per_omega"):
            if key not in data:
                raise DomainError(f"gap report is missing {key!r}")
        return cls(float(data["gamma"]), float(data["delta_universal"]), list(data["per_omega"]))


def empirical_gap(
    S1: FadingDist,
    S2: FadingDist,
    weights: Sequence[float] | None = None,
    grid: QuantizationGrid | None = None,
) -> GapReport:
    """Quantized outer minus quantized inner per weight, plus the BES rates.

    ``gap`` compares the two quantized bounds; ``bes_gap`` compares the
    quantized outer bound with the actual non-stripping BES rates of the
    same level assignment, which is never larger.
    """
    grid = grid or QuantizationGrid.for_pair(DEFAULT_GAMMA, S1, S2)
    ws = list(default_weights(64, 1e-3, 1e3) if weights is None else weights)
    report = GapReport(grid.gamma, universal_gap(grid.gamma))
    for w in ws:
        out = quantized_outer(S1, S2, w, grid)
        inn = quantized_inner(S1, S2, w, grid)
        achieved = bes.achievable_rates(S1, S2, quantized_assignment(S1, S2, w, grid), stripping=False)
        report.per_omega.append(
            {
                "omega": float(w),
                "outer": [out.R1, out.R2],
                "inner": [inn.R1, inn.R2],
                "gap": [out.R1 - inn.R1, out.R2 - inn.R2],
                "bes": list(achieved),
                "bes_gap": [out.R1 - achieved[0], out.R2 - achieved[1]],
            }
        )
    return report
