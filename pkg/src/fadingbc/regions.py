"""Rate-region boundaries: concave frontiers of rate pairs and their supporting weights."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

POINT_TOL = 1e-12


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def frontier(points: Iterable[tuple[float, float]], tol: float = POINT_TOL) -> list[tuple[float, float]]:
    """Vertices of the upper-right boundary of the region spanned by ``points``.

    The region is the convex hull of the points together with everything they
    dominate (rates can always be lowered).  Vertices are returned from the
    R1-axis corner ``(max R1, 0)`` to the R2-axis corner ``(0, max R2)``;
    collinear and dominated interior points are dropped.
    """
    pts = [(max(float(x), 0.0), max(float(y), 0.0)) for x, y in points]
    if not pts:
        raise ValueError("frontier of an empty point set")
    max1 = max(p[0] for p in pts)
    max2 = max(p[1] for p in pts)
    if max2 <= tol:
        return [(max1, 0.0)]
    if max1 <= tol:
        return [(0.0, max2)]

    # merge points whose R1 agree within tol, keeping the first R1 and the best R2
    ordered: list[tuple[float, float]] = []
    for x, y in sorted(pts + [(0.0, max2)]):
        if ordered and x - ordered[-1][0] <= tol * max(1.0, x):
            ordered[-1] = (ordered[-1][0], max(ordered[-1][1], y))
        else:
            ordered.append((x, y))

    hull: list[tuple[float, float]] = []
    scale = max(max1, max2)
    for p in ordered:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= -tol * scale * scale:
            hull.pop()
        hull.append(p)
    hull.reverse()
    if hull[0][1] > tol:
        hull.insert(0, (hull[0][0], 0.0))
    else:
        hull[0] = (hull[0][0], 0.0)
    return hull


def edge_weights(vertices: Sequence[tuple[float, float]]) -> list[float]:
    """Weight omega at which R1 + omega R2 ties between consecutive vertices."""
    out = []
    for (x0, y0), (x1, y1) in zip(vertices[:-1], vertices[1:]):
        dy = y1 - y0
        out.append(math.inf if dy <= 0 else max((x0 - x1) / dy, 0.0))
    return out


@dataclass(frozen=True)
class RateRegionBoundary:
    """Extreme points ordered from the R1 axis to the R2 axis.

    ``critical_weights[0]`` is 0; entry ``k >= 1`` is the weight at which
    extreme points ``k-1`` and ``k`` both maximize R1 + omega R2.
    """

    extreme_points: tuple[tuple[float, float], ...]
    critical_weights: tuple[float, ...]

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> "RateRegionBoundary":
        verts = frontier(points)
        return cls(tuple(verts), (0.0,) + tuple(edge_weights(verts)))

    def omega_intervals(self) -> list[tuple[float, float]]:
        ws = list(self.critical_weights) + [math.inf]
        return [(ws[k], ws[k + 1]) for k in range(len(self.extreme_points))]

    def weighted_max(self, omega: float) -> float:
        return max(r1 + omega * r2 for r1, r2 in self.extreme_points)

    def r1_at(self, r2: float) -> float:
        """Largest R1 on the boundary at the given R2 (time sharing between vertices)."""
        pts = self.extreme_points
        if r2 > pts[-1][1] + POINT_TOL:
            return -math.inf
        best = -math.inf
        if len(pts) == 1:
            return pts[0][0] if r2 <= pts[0][1] + POINT_TOL else -math.inf
        for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
            if y0 - POINT_TOL <= r2 <= y1 + POINT_TOL:
                if y1 - y0 <= POINT_TOL:
                    best = max(best, x0)
                else:
                    t = min(max((r2 - y0) / (y1 - y0), 0.0), 1.0)
                    best = max(best, x0 + t * (x1 - x0))
        return best

    def r2_at(self, r1: float) -> float:
        swapped = RateRegionBoundary(
            tuple((y, x) for x, y in reversed(self.extreme_points)), (0.0,)
        )
        return swapped.r1_at(r1)

    def contains(self, point: tuple[float, float], tol: float = 1e-9) -> bool:
        r1, r2 = point
        if r1 < -tol or r2 < -tol:
            return False
        return self.r1_at(max(r2 - tol, 0.0)) >= r1 - tol

    def scaled(self, factor: float) -> "RateRegionBoundary":
        return RateRegionBoundary(
            tuple((factor * a, factor * b) for a, b in self.extreme_points),
            self.critical_weights,
        )

    def rows(self) -> list[tuple[float, float, float, float]]:
        return [
            (lo, hi, r1, r2)
            for (lo, hi), (r1, r2) in zip(self.omega_intervals(), self.extreme_points)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega_low", "omega_high", "R1", "R2"])
        for row in self.rows():
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "extreme_points": [list(p) for p in self.extreme_points],
            "critical_weights": [_enc(w) for w in self.critical_weights],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "RateRegionBoundary":
        return cls(
            tuple((float(a), float(b)) for a, b in data["extreme_points"]),
            tuple(_dec(w) for w in data["critical_weights"]),
        )


def _enc(x: float):
    return "inf" if math.isinf(x) else x


def _dec(x) -> float:
    return math.inf if x == "inf" else float(x)
