"""Empirical circle-rotation side: truncated target unions and hit counting.

For a window Q0 <= q <= Q the union of arcs B(q*theta mod 1, psi(q)) is an
exact-measure proxy for the infinite-hit target set; its measure rising
toward 1 as Q grows is the observable.  Centers carry a certified error
from the convergent table, which inflates (outer) or deflates (inner) the
arcs, giving honest two-sided measure bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .arcs import ArcUnion
from .cf import (
    ConvergentTable,
    ROUNDING_EPS,
    ThetaSpec,
    ensure_depth,
    multiples_mod_one,
)
from .sequences import PsiSpec

DEFAULT_DELTA = 1e-15


def _prepared(theta: ThetaSpec, Q: int, delta: float, table: Optional[ConvergentTable]):
    if delta <= 0:
        raise ValueError("domain error: delta must be > 0")
    table = ensure_depth(theta, table, int(math.ceil(Q / delta)))
    centers = multiples_mod_one(table, Q)
    err = delta + 4 * ROUNDING_EPS
    return table, centers, err


def target_union(
    theta: ThetaSpec,
    psi: PsiSpec,
    Q0: int,
    Q: int,
    delta: float = DEFAULT_DELTA,
    bound: str = "outer",
    table: Optional[ConvergentTable] = None,
) -> ArcUnion:
    """Union of B(q*theta mod 1, psi(q)) over Q0 <= q <= Q.

    bound: "outer" inflates radii by the certified center error, "inner"
    deflates, "nominal" uses psi as-is.
    """
    if not (1 <= Q0 <= Q):
        raise ValueError("need 1 <= Q0 <= Q")
    table, centers, err = _prepared(theta, Q, delta, table)
    qs = np.arange(Q0, Q + 1)
    radii = psi.values_array(qs)
    radii = _adjust(radii, err, bound)
    return ArcUnion.from_arcs(centers[Q0 - 1 :], radii)


def _adjust(radii: np.ndarray, err: float, bound: str) -> np.ndarray:
    if bound == "outer":
        return radii + err
    if bound == "inner":
        return np.maximum(radii - err, 0.0)
    if bound == "nominal":
        return radii
    raise ValueError(f"unknown bound {bound!r}")


@dataclass
class HitResult:
    count: int
    hits: list[int]
    uncertain: list[int]  # q whose margin is below the certified error
    distances: np.ndarray
    margins: np.ndarray


def hit_count(
    theta: ThetaSpec,
    psi: PsiSpec,
    s: float,
    Q: int,
    delta: float = DEFAULT_DELTA,
    table: Optional[ConvergentTable] = None,
) -> HitResult:
    """Count q <= Q with ||q*theta - s|| < psi(q).

    Decisions whose margin is below the certified error are reported as
    uncertain rather than silently resolved.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    table, centers, err = _prepared(theta, Q, delta, table)
    s = float(s) % 1.0
    d = np.abs(centers - s)
    d = np.minimum(d, 1.0 - d)
    radii = psi.values_array(np.arange(1, Q + 1))
    margins = radii - d
    uncertain_mask = np.abs(margins) <= err
    hit_mask = (margins > 0) & ~uncertain_mask
    hits = (np.flatnonzero(hit_mask) + 1).tolist()
    uncertain = (np.flatnonzero(uncertain_mask) + 1).tolist()
    return HitResult(
        count=len(hits),
        hits=hits,
        uncertain=uncertain,
        distances=d,
        margins=margins,
    )


@dataclass
class MeasureProfile:
    Q0: int
    checkpoints: list[int]
    inner: list[float]
    outer: list[float]
    params: dict = field(default_factory=dict)

    def rows(self):
        for Q, mi, mo in zip(self.checkpoints, self.inner, self.outer):
            yield Q, mi, mo


def tail_measure_profile(
    theta: ThetaSpec,
    psi: PsiSpec,
    Q0: int,
    checkpoints: Sequence[int],
    delta: float = DEFAULT_DELTA,
) -> MeasureProfile:
    """Inner/outer measure of the union over [Q0, Q_j] at each checkpoint."""
    checkpoints = [int(c) for c in checkpoints]
    if not checkpoints or any(
        checkpoints[i] >= checkpoints[i + 1] for i in range(len(checkpoints) - 1)
    ):
        raise ValueError("checkpoints must be strictly increasing and nonempty")
    if checkpoints[0] < Q0:
        raise ValueError("checkpoints must be >= Q0")
    Qmax = checkpoints[-1]
    table, centers, err = _prepared(theta, Qmax, delta, None)
    qs = np.arange(Q0, Qmax + 1)
    radii = psi.values_array(qs)
    inner, outer = [], []
    for Q in checkpoints:
        n = Q - Q0 + 1
        c = centers[Q0 - 1 : Q0 - 1 + n]
        inner.append(ArcUnion.from_arcs(c, _adjust(radii[:n], err, "inner")).measure)
        outer.append(ArcUnion.from_arcs(c, _adjust(radii[:n], err, "outer")).measure)
    return MeasureProfile(
        Q0=Q0,
        checkpoints=checkpoints,
        inner=inner,
        outer=outer,
        params={"delta": delta, "center_error": err},
    )


def union_bound_tail(psi: PsiSpec, Q0: int, Q: int) -> float:
    """Explicit first-moment bound sum_{Q0 <= q <= Q} 2 psi(q)."""
    qs = np.arange(Q0, Q + 1)
    return float(2.0 * psi.values_array(qs).sum())
