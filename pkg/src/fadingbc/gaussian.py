"""Fading-state distributions and the state-partition outer bound.

Rates are in bits per complex channel use.  A distribution is described by
its complementary CDF Fbar(s) = P(S >= s) for s >= 0; the value at s = 0 may
be below 1 when the channel is off with positive probability.  Jumps of Fbar
must be declared as atoms so quadrature and partition searches never straddle
one blindly.

The outer bound for weight omega splits the state axis into
I1 = {s : Fbar1(s) > omega Fbar2(s)} and its complement, then integrates each
user's Fbar against 1/(1+s) over its own part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import IntervalSet, QuadratureConfig, integrate_ccdf_weighted, mu_gamma
from .errors import DomainError
from .regions import RateRegionBoundary

TIE_RTOL = 1e-12
BISECT_RTOL = 1e-10
GRID_POINTS = 2**14
GRID_FLOOR = 1e-6
SUPPORT_TAIL = 1e-15

KINDS = ("intermittent", "rayleigh", "tabulated", "mixture", "custom")


def _arr(s):
    a = np.asarray(s, dtype=float)
    return np.atleast_1d(a), a.ndim == 0


@dataclass(frozen=True, eq=False)
class FadingDist:
    """Channel power-gain law given through its complementary CDF.

    Use the constructors (``intermittent``, ``rayleigh``, ``tabulated``,
    ``mixture``, ``zero``) rather than the raw initializer.  ``log_ccdf`` is
    vectorized and stays finite deep into the tail, which matters when a
    partition weight is astronomically large.
    """

    kind: str
    params: Mapping = field(default_factory=dict)
    atoms: tuple[float, ...] = ()
    support_max: float = math.inf
    _log_ccdf: Callable = field(default=None, repr=False)
    _sampler: Callable | None = field(default=None, repr=False)

    # constructors

    @classmethod
    def intermittent(cls, p: float, snr: float) -> "FadingDist":
        """State s* with probability p, otherwise 0."""
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"activity probability must lie in [0, 1], got {p}")
        if not (snr > 0 and math.isfinite(snr)):
            raise DomainError(f"peak SNR must be finite and > 0, got {snr}")
        d = cls.tabulated([(snr, p)])
        return cls("intermittent", {"p": float(p), "snr": float(snr)}, d.atoms, d.support_max, d._log_ccdf, d._sampler)

    @classmethod
    def rayleigh(cls, mean_snr: float) -> "FadingDist":
        """Exponentially distributed power gain with the given mean."""
        if not (mean_snr > 0 and math.isfinite(mean_snr)):
            raise DomainError(f"mean SNR must be finite and > 0, got {mean_snr}")
        g = float(mean_snr)

        def log_ccdf(s):
            return -np.maximum(s, 0.0) / g

        def sampler(rng, size):
            return rng.exponential(g, size)

        return cls("rayleigh", {"mean_snr": g}, (), math.inf, log_ccdf, sampler)

    @classmethod
    def tabulated(cls, points: Sequence[Sequence[float]]) -> "FadingDist":
        """Discrete law from breakpoints ``[(s_k, v_k), ...]``.

        Fbar equals v_k on (s_{k-1}, s_k] (with s_0 = 0, closed at 0) and 0
        beyond the last breakpoint, so P(S = s_k) = v_k - v_{k+1}.
        """
        pts = [(float(s), float(v)) for s, v in points]
        if not pts:
            raise DomainError("tabulated distribution needs at least one point")
        xs = np.array([s for s, _ in pts])
        vs = np.array([v for _, v in pts])
        if np.any(xs <= 0) or np.any(np.diff(xs) <= 0) or not np.all(np.isfinite(xs)):
            raise DomainError("breakpoints must be finite, positive and strictly increasing")
        if np.any(vs < 0) or np.any(vs > 1) or np.any(np.diff(vs) > 0):
            raise DomainError("tabulated ccdf values must be non-increasing within [0, 1]")
        with np.errstate(divide="ignore"):
            logv = np.append(np.log(vs), -np.inf)

        def log_ccdf(s):
            return logv[np.searchsorted(xs, s, side="left")]

        mass = vs - np.append(vs[1:], 0.0)
        values = np.append(0.0, xs)
        probs = np.append(1.0 - vs[0], mass)
        probs = np.clip(probs, 0.0, None)
        probs = probs / probs.sum()

        def sampler(rng, size):
            return rng.choice(values, size=size, p=probs)

        return cls(
            "tabulated",
            {"points": [list(p) for p in pts]},
            tuple(xs.tolist()),
            float(xs[-1]),
            log_ccdf,
            sampler,
        )

    @classmethod
    def mixture(cls, weights: Sequence[float], components: Sequence["FadingDist"]) -> "FadingDist":
        w = np.asarray(weights, dtype=float)
        if len(w) != len(components) or len(w) == 0:
            raise DomainError("mixture needs one weight per component")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("mixture weights must be non-negative and sum to 1")
        comps = tuple(components)
        with np.errstate(divide="ignore"):
            logw = np.log(w)

        def log_ccdf(s):
            stack = np.stack([lw + c.log_ccdf(s) for lw, c in zip(logw, comps)])
            return _logsumexp(stack)

        def sampler(rng, size):
            which = rng.choice(len(comps), size=size, p=w / w.sum())
            out = np.zeros(size)
            for k, c in enumerate(comps):
                m = which == k
                if m.any():
                    out[m] = c.sample(rng, int(m.sum()))
            return out

        atoms = tuple(sorted({a for c, wk in zip(comps, w) if wk > 0 for a in c.atoms}))
        return cls(
            "mixture",
            {"weights": w.tolist(), "components": [c.to_dict() for c in comps]},
            atoms,
            max(c.support_max for c in comps),
            log_ccdf,
            sampler,
        )

    @classmethod
    def zero(cls) -> "FadingDist":
        """The dead channel S = 0."""
        return cls.tabulated([(1.0, 0.0)])

    @classmethod
    def from_ccdf(cls, ccdf: Callable, atoms: Sequence[float] = (), support_max: float = math.inf) -> "FadingDist":
        """Wrap an arbitrary vectorized ccdf; sampling falls back to numeric inversion."""

        def log_ccdf(s):
            with np.errstate(divide="ignore"):
                return np.log(np.clip(ccdf(s), 0.0, 1.0))

        return cls("custom", {}, tuple(sorted(set(float(a) for a in atoms))), float(support_max), log_ccdf, None)

    # evaluation

    def log_ccdf(self, s):
        arr, scalar = _arr(s)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise DomainError("fading states must be >= 0")
        out = np.asarray(self._log_ccdf(arr), dtype=float)
        out = np.minimum(out, 0.0)
        return float(out[0]) if scalar else out

    def ccdf(self, s):
        """P(S >= s)."""
        out = np.exp(self.log_ccdf(s))
        return float(out) if np.ndim(out) == 0 else out

    def support_bound(self) -> float:
        """A state beyond which Fbar is negligible (or exactly zero)."""
        if math.isfinite(self.support_max):
            return self.support_max
        t = 1.0
        while self.log_ccdf(t) > math.log(SUPPORT_TAIL):
            t *= 2.0
            if t > 1e300:
                raise DomainError("distribution tail never becomes negligible")
        return t

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self._sampler is not None:
            return np.asarray(self._sampler(rng, size), dtype=float)
        return self._invert(rng.random(size))

    def _invert(self, u: np.ndarray) -> np.ndarray:
        # S = sup{s : Fbar(s) >= u}, by bisection on a log-spaced bracket
        lo = np.zeros_like(u)
        hi = np.full_like(u, self.support_bound() * 2.0)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            up = self.ccdf(mid) >= u
            lo = np.where(up, mid, lo)
            hi = np.where(up, hi, mid)
        return lo

    # serialization

    def to_dict(self) -> dict:
        if self.kind == "intermittent":
            return {"kind": "intermittent", "p": self.params["p"], "snr": self.params["snr"]}
        if self.kind == "rayleigh":
            return {"kind": "rayleigh", "mean_snr": self.params["mean_snr"]}
        if self.kind == "tabulated":
            return {"kind": "tabulated", "points": self.params["points"]}
        if self.kind == "mixture":
            return {
                "kind": "mixture",
                "components": [
                    {"weight": w, "dist": c} for w, c in zip(self.params["weights"], self.params["components"])
                ],
            }
        raise DomainError("custom distributions have no JSON form")

    @classmethod
    def from_dict(cls, data: Mapping) -> "FadingDist":
        if not isinstance(data, Mapping) or "kind" not in data:
            raise DomainError("distribution JSON needs a 'kind' field")
        kind = data["kind"]
        try:
            if kind == "intermittent":
                return cls.intermittent(float(data["p"]), float(data["snr"]))
            if kind == "rayleigh":
                return cls.rayleigh(float(data["mean_snr"]))
            if kind == "tabulated":
                return cls.tabulated(data["points"])
            if kind == "mixture":
                comps = data["components"]
                return cls.mixture([c["weight"] for c in comps], [cls.from_dict(c["dist"]) for c in comps])
        except KeyError as exc:
            raise DomainError(f"distribution of kind {kind!r} is missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed {kind!r} distribution: {exc}") from None
        raise DomainError(f"unknown distribution kind {kind!r}; expected one of {KINDS[:4]}")


def _logsumexp(stack: np.ndarray) -> np.ndarray:
    m = np.max(stack, axis=0)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        return np.where(np.isfinite(m), safe + np.log(np.sum(np.exp(stack - safe), axis=0)), -np.inf)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class RatePoint:
    R1: float
    R2: float
    omega: float

    def __post_init__(self):
        if self.R1 < 0 or self.R2 < 0:
            raise DomainError("rates must be non-negative")

    def as_tuple(self) -> tuple[float, float]:
        return (self.R1, self.R2)


def ergodic_capacity(S: FadingDist, cfg: QuadratureConfig | None = None) -> float:
    return integrate_ccdf_weighted(S.ccdf, IntervalSet.full(), cfg, atoms=S.atoms)


def _log_weight(omega: float | None, log_omega: float | None) -> float:
    if log_omega is not None:
        if omega is not None:
            raise DomainError("pass omega or log_omega, not both")
        if math.isnan(log_omega):
            raise DomainError("log_omega is NaN")
        return float(log_omega)
    if omega is None or not omega >= 0:
        raise DomainError(f"omega must be >= 0, got {omega!r}")
    return math.log(omega) if omega > 0 else -math.inf


def _in_user1(l1: np.ndarray, l2: np.ndarray, lw: float) -> np.ndarray:
    rhs = lw + l2
    with np.errstate(invalid="ignore"):
        return (l1 > rhs + TIE_RTOL) & np.isfinite(l1)


def _state_grid(S1: FadingDist, S2: FadingDist, points: int) -> tuple[np.ndarray, set[float]]:
    atoms = set(S1.atoms) | set(S2.atoms)
    top = 2.0 * max(S1.support_bound(), S2.support_bound(), max(atoms, default=0.0), 1.0)
    grid = np.concatenate(([0.0], np.geomspace(GRID_FLOOR, top, points), sorted(atoms)))
    return np.unique(grid), atoms


def partition_states(
    S1: FadingDist,
    S2: FadingDist,
    omega: float | None = None,
    *,
    log_omega: float | None = None,
    grid_points: int = GRID_POINTS,
) -> tuple[IntervalSet, IntervalSet]:
    """Split [0, inf) into I1 = {Fbar1 > omega Fbar2} and its complement I2.

    Ties (within a relative 1e-12) go to I2.  Sign changes are located on a
    log grid and refined by bisection; atoms are grid points, so each grid
    cell sees continuous ccdfs.  Set endpoints are exact up to measure zero.
    """
    lw = _log_weight(omega, log_omega)
    grid, atoms = _state_grid(S1, S2, grid_points)
    nxt = np.append(grid[1:], grid[-1] * 2.0)
    # just right of each grid point (differs from the point itself at atoms)
    is_atom = np.isin(grid, list(atoms))
    right_of = np.where(is_atom, grid + np.maximum(grid, 1.0) * 1e-13, grid)
    inside_left = np.minimum(right_of, 0.5 * (grid + nxt))
    # left-continuity: Fbar at the next grid point is the limit from inside the cell
    lab_l = _in_user1(S1.log_ccdf(inside_left), S2.log_ccdf(inside_left), lw)
    lab_r = _in_user1(S1.log_ccdf(nxt), S2.log_ccdf(nxt), lw)

    def label(s: float) -> bool:
        return bool(_in_user1(S1.log_ccdf(np.array([s])), S2.log_ccdf(np.array([s])), lw)[0])

    ends = nxt.copy()
    ends[-1] = math.inf
    pieces: list[tuple[float, float]] = []
    whole = np.flatnonzero(lab_l & lab_r)
    if whole.size:
        # merge runs of consecutive fully-user-1 cells
        breaks = np.flatnonzero(np.diff(whole) > 1)
        starts = np.append(whole[0], whole[breaks + 1])
        stops = np.append(whole[breaks], whole[-1])
        pieces += [(float(grid[a]), float(ends[b])) for a, b in zip(starts, stops)]
    for k in np.flatnonzero(lab_l != lab_r):
        lo, hi = float(inside_left[k]), float(nxt[k])
        while hi - lo > BISECT_RTOL * max(hi, 1e-300):
            mid = 0.5 * (lo + hi)
            if label(mid) == lab_l[k]:
                lo = mid
            else:
                hi = mid
        cut = 0.5 * (lo + hi)
        pieces.append((float(grid[k]), cut) if lab_l[k] else (cut, float(ends[k])))
    i1 = IntervalSet(tuple(pieces))
    return i1, i1.complement()


def outer_extreme_point(
    S1: FadingDist,
    S2: FadingDist,
    omega: float | None = None,
    *,
    log_omega: float | None = None,
    cfg: QuadratureConfig | None = None,
) -> RatePoint:
    """Outer-bound rate pair maximizing R1 + omega R2 for the given weight."""
    i1, i2 = partition_states(S1, S2, omega, log_omega=log_omega)
    r1 = integrate_ccdf_weighted(S1.ccdf, i1, cfg, atoms=S1.atoms)
    r2 = integrate_ccdf_weighted(S2.ccdf, i2, cfg, atoms=S2.atoms)
    w = math.exp(log_omega) if log_omega is not None and log_omega < 709 else (omega if omega is not None else math.inf)
    return RatePoint(r1, r2, w)


def default_weights(points: int = 256, lo: float = 1e-4, hi: float = 1e4) -> np.ndarray:
    return np.geomspace(lo, hi, points)


def weight_hints(S1: FadingDist, S2: FadingDist) -> list[float]:
    """Ratios Fbar1/Fbar2 on both sides of every atom, where the kinks sit."""
    atoms = sorted(set(S1.atoms) | set(S2.atoms))
    probes = [0.0]
    for a in atoms:
        probes += [a, a * (1 + 1e-9)]
    out = set()
    for s in probes:
        f1, f2 = S1.ccdf(s), S2.ccdf(s)
        if f1 > 0 and f2 > 0 and 0 < f1 / f2 < math.inf:
            out.add(f1 / f2)
    return sorted(out)


def outer_sweep(
    S1: FadingDist,
    S2: FadingDist,
    weights: Sequence[float] | None = None,
    cfg: QuadratureConfig | None = None,
) -> list[RatePoint]:
    """Extreme points on a weight grid, plus the two single-user corners."""
    ws = list(default_weights() if weights is None else weights)
    if any(not w >= 0 for w in ws):
        raise DomainError("weights must be non-negative")
    ws = sorted({float(w) for w in ws} | set(weight_hints(S1, S2)))
    pts = [RatePoint(ergodic_capacity(S1, cfg), 0.0, 0.0)]
    pts += [outer_extreme_point(S1, S2, w, cfg=cfg) for w in ws]
    pts.append(RatePoint(0.0, ergodic_capacity(S2, cfg), math.inf))
    return pts


def outer_region(
    S1: FadingDist,
    S2: FadingDist,
    weights: Sequence[float] | None = None,
    cfg: QuadratureConfig | None = None,
) -> RateRegionBoundary:
    return RateRegionBoundary.from_points(p.as_tuple() for p in outer_sweep(S1, S2, weights, cfg))


def enhance_continuous(S1: FadingDist, S2: FadingDist, omega: float) -> FadingDist:
    """Fbar_enh = min(1, max(Fbar1, omega Fbar2)); stochastically dominates S1."""
    if not omega >= 1:
        raise DomainError("enhancement needs omega >= 1; for omega < 1 swap the users and use 1/omega")
    lw = math.log(omega)

    def ccdf(s):
        with np.errstate(over="ignore"):
            return np.minimum(1.0, np.maximum(S1.ccdf(s), np.exp(np.minimum(lw + S2.log_ccdf(s), 0.0))))

    return FadingDist.from_ccdf(
        ccdf, set(S1.atoms) | set(S2.atoms), max(S1.support_max, S2.support_max)
    )


# closed forms for the worked examples


def intermittent_capacity(p: float, snr: float) -> float:
    return p * math.log2(1.0 + snr)


def intermittent_outer_points(p1: float, s1: float, p2: float, s2: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Corner (C1, 0) and the kink (C1 - rho C2, C2) for s2 <= s1, p2 >= p1."""
    if not (s2 <= s1 and p2 >= p1 > 0):
        raise DomainError("closed form needs s2* <= s1* and p2 >= p1 > 0")
    c1, c2 = intermittent_capacity(p1, s1), intermittent_capacity(p2, s2)
    rho = p1 / p2
    return (c1, 0.0), (c1 - rho * c2, c2)


def intermittent_outer_boundary(p1: float, s1: float, p2: float, s2: float) -> RateRegionBoundary:
    (c1, _), kink = intermittent_outer_points(p1, s1, p2, s2)
    return RateRegionBoundary.from_points([(c1, 0.0), kink, (0.0, kink[1])])


def awgn_rayleigh_outer(p1: float, s1: float, gamma2: float, s_omega: float, cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """Boundary point for threshold state s_omega in [0, s1*]."""
    if not 0.0 <= s_omega <= s1:
        raise DomainError("threshold state must lie in [0, s1*]")
    r1 = p1 * math.log2((1.0 + s1) / (1.0 + s_omega))
    r2 = mu_gamma(gamma2, 0.0, s_omega, cfg) + mu_gamma(gamma2, s1, math.inf, cfg)
    return r1, r2


def threshold_log_weight(p1: float, gamma2: float, s_omega: float) -> float:
    """log omega at which the partition threshold sits at s_omega."""
    return math.log(p1) + s_omega / gamma2
