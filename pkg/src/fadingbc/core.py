"""Special functions, interval sets and the weighted-CCDF quadrature kernel.

Every bound in the package reduces to integrals of the form

    log2(e) * integral over a set of  Fbar(s) / (1 + s) ds

which are evaluated here after the substitution u = ln(1 + s).  Under that
change of variable the integrand is just ``Fbar(expm1(u))``, bounded in
[0, 1], so adaptive quadrature stays well conditioned over many decades of
SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate, special

from .errors import ContractError, DomainError, NumericError

LOG2E = 1.0 / math.log(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_TAIL_SWITCH = 8.0
_CF_TERMS = 80


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr).astype(float, copy=True), arr.ndim == 0


def _check_finite(arr, name):
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} requires finite input")


def normal_pdf(x):
    arr, scalar = _as_array(x)
    out = _INV_SQRT_2PI * np.exp(-0.5 * arr * arr)
    return float(out[0]) if scalar else out


def _mills_tail(x):
    """Continued-fraction tail t(x) with Q(x)/phi(x) = 1 / (x + t(x)), for x >= 8."""
    t = np.zeros_like(x)
    for k in range(_CF_TERMS, 1, -1):
        t = k / (x + t)
    return 1.0 / (x + t)


def q_function(x):
    """Standard normal upper tail P(Z >= x)."""
    arr, scalar = _as_array(x)
    _check_finite(arr, "q_function")
    out = 0.5 * special.erfc(arr / math.sqrt(2.0))
    big = arr > _TAIL_SWITCH
    if np.any(big):
        xb = arr[big]
        out[big] = normal_pdf(xb) / (xb + _mills_tail(xb))
    small = arr < -_TAIL_SWITCH
    if np.any(small):
        xs = -arr[small]
        out[small] = 1.0 - normal_pdf(xs) / (xs + _mills_tail(xs))
    return float(out[0]) if scalar else out


def g_function(x):
    """Antiderivative of Q: x Q(x) - phi(x), with G(x) -> 0 as x -> inf."""
    arr, scalar = _as_array(x)
    _check_finite(arr, "g_function")
    out = np.empty_like(arr)
    big = arr > _TAIL_SWITCH
    rest = ~big
    xr = arr[rest]
    out[rest] = xr * q_function(xr) - normal_pdf(xr)
    if np.any(big):
        xb = arr[big]
        t = _mills_tail(xb)
        # x*R(x) - 1 = -t / (x + t) without cancellation
        out[big] = -normal_pdf(xb) * t / (xb + t)
    return float(out[0]) if scalar else out


def binary_entropy(p):
    """H(p) in bits, with 0 log 0 = 0."""
    arr, scalar = _as_array(p)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise DomainError("binary_entropy requires p in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -special.xlogy(arr, arr) - special.xlogy(1.0 - arr, 1.0 - arr)
    out = out * LOG2E + 0.0
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_subdivisions: int = 200
    tail_cutoff_prob: float = 1e-12

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if not 0.0 < self.tail_cutoff_prob <= 1e-6:
            raise DomainError("tail_cutoff_prob must lie in (0, 1e-6]")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint half-open intervals [a, b) on [0, inf).

    Endpoint openness is not tracked; every consumer integrates over the set,
    where single points carry no mass.
    """

    intervals: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        cleaned = []
        for a, b in sorted((float(a), float(b)) for a, b in self.intervals):
            if math.isnan(a) or math.isnan(b) or a < 0.0 or math.isinf(a):
                raise DomainError(f"invalid interval [{a}, {b})")
            if b <= a:
                continue
            if cleaned and a <= cleaned[-1][1]:
                cleaned[-1] = (cleaned[-1][0], max(cleaned[-1][1], b))
            else:
                cleaned.append((a, b))
        object.__setattr__(self, "intervals", tuple(cleaned))

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls(((0.0, math.inf),))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, s: float) -> bool:
        return any(a <= s < b for a, b in self.intervals)

    def complement(self) -> "IntervalSet":
        out, start = [], 0.0
        for a, b in self.intervals:
            if a > start:
                out.append((start, a))
            start = b
        if start < math.inf:
            out.append((start, math.inf))
        return IntervalSet(tuple(out))

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if hi > lo:
                    out.append((lo, hi))
        return IntervalSet(tuple(out))

    def approx_equal(self, other: "IntervalSet", rtol: float = 1e-9) -> bool:
        if len(self) != len(other):
            return False
        for (a, b), (c, d) in zip(self.intervals, other.intervals):
            for x, y in ((a, c), (b, d)):
                if math.isinf(x) or math.isinf(y):
                    if x != y:
                        return False
                elif abs(x - y) > rtol * max(1.0, abs(x), abs(y)):
                    return False
        return True


def _checked(ccdf: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(s):
        v = float(ccdf(s))
        if not (-1e-12 <= v <= 1.0 + 1e-12):
            raise ContractError(f"ccdf({s!r}) = {v!r} lies outside [0, 1]")
        return v

    return wrapped


def _quad_log(f, u0, u1, cfg: QuadratureConfig, what: str) -> float:
    """Integrate f(expm1(u)) du over [u0, u1] (u1 may be inf)."""
    if u1 <= u0:
        return 0.0
    res = integrate.quad(
        lambda u: f(math.expm1(u)),
        u0,
        u1,
        epsabs=cfg.abs_tol / LOG2E,
        epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions,
        full_output=1,
    )
    if len(res) > 3:
        raise NumericError(
            f"quadrature did not converge for {what}",
            lower=math.expm1(u0),
            upper=math.expm1(u1) if math.isfinite(u1) else math.inf,
            estimate=res[0],
            abserr=res[1],
            message=res[3],
        )
    return res[0]


def _tail_point(ccdf, start: float, cfg: QuadratureConfig) -> float:
    t = max(1.0, 2.0 * start)
    while ccdf(t) > cfg.tail_cutoff_prob:
        t *= 2.0
        if t > 1e300:
            raise NumericError("ccdf never falls below the tail cutoff", start=start)
    return t


def integrate_ccdf_weighted(
    ccdf: Callable[[float], float],
    intervals: IntervalSet | Iterable[tuple[float, float]],
    cfg: QuadratureConfig | None = None,
    atoms: Sequence[float] = (),
) -> float:
    """log2(e) * integral of ccdf(s) / (1 + s) over ``intervals``, in bits.

    ``atoms`` lists the locations where ``ccdf`` jumps; integration pieces
    are split there so no jump is bracketed by a single quadrature call.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    if not isinstance(intervals, IntervalSet):
        intervals = IntervalSet(tuple(intervals))
    f = _checked(ccdf)
    total = 0.0
    for a, b in intervals:
        upper = b
        tail = 0.0
        if math.isinf(b):
            upper = _tail_point(f, a, cfg)
            tail = _quad_log(f, math.log1p(upper), math.inf, cfg, "tail")
        cuts = [a] + sorted(x for x in set(atoms) if a < x < upper) + [upper]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            total += _quad_log(f, math.log1p(lo), math.log1p(hi), cfg, "interval")
        total += tail
    return max(total, 0.0) * LOG2E


def mu_gamma(gamma: float, a: float, b: float, cfg: QuadratureConfig | None = None) -> float:
    """log2(e) * integral_a^b exp(-s / gamma) / (1 + s) ds."""
    if not gamma > 0 or not math.isfinite(gamma):
        raise DomainError("mu_gamma requires a finite gamma > 0")
    if not (0.0 <= a <= b) or math.isnan(b) or math.isinf(a):
        raise DomainError(f"mu_gamma requires 0 <= a <= b, got a={a}, b={b}")
    return integrate_ccdf_weighted(
        lambda s: math.exp(-s / gamma), IntervalSet(((a, b),)), cfg
    )
