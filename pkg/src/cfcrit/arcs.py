"""Unions of half-open arcs on the unit circle with exact total measure."""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from . import _kernels
from .cf import CirclePoint

FULL_LEFT = np.array([0.0])
FULL_RIGHT = np.array([1.0])


def _segments(centers: np.ndarray, radii: np.ndarray):
    """Split arcs B(c, r) into non-wrapping [l, r) segments in [0, 1]."""
    centers = np.mod(np.asarray(centers, dtype=np.float64), 1.0)
    radii = np.asarray(radii, dtype=np.float64)
    if np.any(radii < 0):
        raise ValueError("negative radius")
    full = radii >= 0.5
    if full.any():
        return FULL_LEFT.copy(), FULL_RIGHT.copy(), True
    keep = radii > 0
    centers, radii = centers[keep], radii[keep]
    lo = centers - radii
    hi = centers + radii
    segs_l = []
    segs_r = []
    plain = (lo >= 0.0) & (hi <= 1.0)
    segs_l.append(lo[plain])
    segs_r.append(hi[plain])
    wrap_lo = lo < 0.0
    segs_l.append(np.zeros(wrap_lo.sum()))
    segs_r.append(hi[wrap_lo])
    segs_l.append(lo[wrap_lo] + 1.0)
    segs_r.append(np.ones(wrap_lo.sum()))
    wrap_hi = hi > 1.0
    segs_l.append(lo[wrap_hi])
    segs_r.append(np.ones(wrap_hi.sum()))
    segs_l.append(np.zeros(wrap_hi.sum()))
    segs_r.append(hi[wrap_hi] - 1.0)
    L = np.concatenate(segs_l)
    R = np.concatenate(segs_r)
    ok = R > L
    return L[ok], R[ok], False


@dataclass(frozen=True)
class ArcUnion:
    """Sorted disjoint half-open arcs [l_i, r_i) within [0, 1).

    Immutable; operations return new unions.  The normal form (sorted,
    merged) is independent of insertion order, so equal arc multisets give
    bit-identical unions.
    """

    lefts: np.ndarray
    rights: np.ndarray

    @classmethod
    def empty(cls) -> "ArcUnion":
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def from_arcs(cls, centers, radii) -> "ArcUnion":
        L, R, full = _segments(np.atleast_1d(centers), np.atleast_1d(radii))
        if full:
            return cls(L, R)
        return cls(*_normalize(L, R))

    @property
    def measure(self) -> float:
        if self.lefts.size == 0:
            return 0.0
        return min(math.fsum((self.rights - self.lefts).tolist()), 1.0)

    @property
    def arc_count(self) -> int:
        return int(self.lefts.size)

    def insert(self, center, radius: float) -> "ArcUnion":
        """Union with one more arc B(center, radius)."""
        c = center.value if isinstance(center, CirclePoint) else float(center)
        L, R, full = _segments(np.array([c]), np.array([float(radius)]))
        if full:
            return ArcUnion(L, R)
        if L.size == 0:
            return self
        return ArcUnion(
            *_normalize(np.concatenate([self.lefts, L]), np.concatenate([self.rights, R]))
        )

    def union(self, other: "ArcUnion") -> "ArcUnion":
        return ArcUnion(
            *_normalize(
                np.concatenate([self.lefts, other.lefts]),
                np.concatenate([self.rights, other.rights]),
            )
        )

    def contains(self, s: float) -> bool:
        s = s % 1.0
        i = int(np.searchsorted(self.lefts, s, side="right")) - 1
        return i >= 0 and s < self.rights[i]

    def contains_many(self, s: np.ndarray) -> np.ndarray:
        s = np.mod(np.asarray(s, dtype=np.float64), 1.0)
        i = np.searchsorted(self.lefts, s, side="right") - 1
        ok = i >= 0
        out = np.zeros(s.shape, dtype=bool)
        out[ok] = s[ok] < self.rights[i[ok]]
        return out


def _normalize(L: np.ndarray, R: np.ndarray):
    if L.size == 0:
        return L, R
    order = np.argsort(L, kind="stable")
    return _kernels.merge_sorted(L[order], R[order])


def union_of_arcs(centers, radii) -> ArcUnion:
    return ArcUnion.from_arcs(centers, radii)
