"""Decision functionals over convergent tables.

Everything here works at a finite truncation K, so the asymptotic limsups
are replaced by a documented windowed proxy: the maximum of the statistic
over k in [ceil(rho * K), K] (default rho = 1/2).  Verdicts carry an
"inconclusive" state whenever the window is not stable enough to call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cf import ConvergentTable, SpecError

DEFAULT_WINDOW = 0.5
DEFAULT_GAP = 0.05
DEFAULT_EPS_GRID = tuple(2.0**-j for j in range(9))  # 1, 1/2, ..., 2^-8
DEFAULT_BIG = 5.0
DEFAULT_SLOPE_THRESHOLD = 0.05
MIN_ADMISSIBLE = 10

VERDICT_HOLDS = "holds"
VERDICT_FAILS = "fails"
VERDICT_INCONCLUSIVE = "inconclusive"

IN_CLASS = "in_class"
NOT_IN_CLASS = "not_in_class"
INCONCLUSIVE = "inconclusive"


def sum_largest(values, alpha: float) -> float:
    """Sum of the floor(alpha) largest entries; the full sum if that many
    entries do not exist."""
    if alpha < 0:
        raise ValueError("domain error: alpha must be >= 0")
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    m = int(math.floor(alpha))
    if m <= 0:
        return 0.0
    if m >= n:
        return float(v.sum())
    part = np.partition(v, n - m)[n - m :]
    return float(part.sum())


def admissible_start(table: ConvergentTable) -> int:
    """First k with q_k >= 3, so that ln ln q_k > 0."""
    for k in range(table.K + 1):
        if table.q[k] >= 3:
            return k
    raise SpecError("insufficient depth: no q_k >= 3")


def condition_b_statistic(table: ConvergentTable, eps: float, k: int) -> float:
    """Normalized sum of the largest log-ratios up to index k.

    (1/ln q_k) * [sum of the floor(eps ln q_k / ln ln q_k) largest among
    ln(q_{i+1}/q_i), i = 0..k-1].  Always in [0, 1]; equals 1 once the
    cutoff count reaches k (telescoping, q_0 = 1).
    """
    if eps <= 0:
        raise ValueError("domain error: eps must be > 0")
    if not (2 <= k <= table.K):
        raise ValueError("k out of range")
    if table.q[k] < 3:
        raise ValueError("below admissible index: need q_k >= 3")
    logqk = table.logq[k]
    lr = np.diff(np.asarray(table.logq[: k + 1]))
    cutoff = eps * logqk / math.log(logqk)
    s = sum_largest(lr, cutoff) / logqk
    return min(max(s, 0.0), 1.0)


@dataclass
class CriterionEntry:
    """One statistic series with its windowed-limsup estimate and verdict."""

    name: str
    k_values: np.ndarray
    statistic: np.ndarray
    window_estimate: float
    window_min: float
    verdict: str
    params: dict = field(default_factory=dict)


@dataclass
class CriterionReport:
    entries: list[CriterionEntry]
    overall: str = INCONCLUSIVE
    conflict: bool = False
    params: dict = field(default_factory=dict)

    def entry(self, name: str) -> CriterionEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_tree(self) -> dict:
        return {
            "overall": self.overall,
            "conflict": self.conflict,
            "params": self.params,
            "criteria": [
                {
                    "name": e.name,
                    "window_estimate": e.window_estimate,
                    "window_min": e.window_min,
                    "verdict": e.verdict,
                    "params": e.params,
                }
                for e in self.entries
            ],
        }

    def series_rows(self):
        """Rows (k, {name: value}) for CSV export, one column per statistic."""
        ks = sorted({int(k) for e in self.entries for k in e.k_values})
        cols = {e.name: dict(zip((int(x) for x in e.k_values), e.statistic)) for e in self.entries}
        for k in ks:
            yield k, {name: cols[name].get(k) for name in cols}


def _window_slice(k_values: np.ndarray, K: int, window: float):
    lo = math.ceil(window * K)
    mask = k_values >= lo
    if not mask.any():
        mask = k_values >= k_values[-1]
    return mask


def condition_b_report(
    table: ConvergentTable,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    window: float = DEFAULT_WINDOW,
    gap: float = DEFAULT_GAP,
) -> CriterionReport:
    """Windowed-limsup sweep of the truncation statistic over an eps grid.

    Verdict: "holds" if some eps keeps its window estimate below 1 - gap,
    "fails" if every eps estimate exceeds 1 - gap and the window is stable
    (the last half of the window reaches within gap of the full-window
    maximum), otherwise "inconclusive".
    """
    if len(eps_grid) == 0:
        raise ValueError("eps grid must be nonempty")
    eps_grid = tuple(sorted(set(float(e) for e in eps_grid), reverse=True))
    K = table.K
    start = max(admissible_start(table), 2)
    ks = np.arange(start, K + 1)
    if ks.size < MIN_ADMISSIBLE:
        raise SpecError("insufficient depth: need >= 10 admissible indices")
    logq = np.asarray(table.logq)
    lr = np.diff(logq)

    entries = []
    estimates = {}
    stable_all = True
    for eps in eps_grid:
        stats = np.empty(ks.size)
        for j, k in enumerate(ks):
            logqk = logq[k]
            cutoff = eps * logqk / math.log(logqk)
            m = int(math.floor(cutoff))
            if m <= 0:
                stats[j] = 0.0
            elif m >= k:
                stats[j] = 1.0
            else:
                part = np.partition(lr[:k], k - m)[k - m :]
                stats[j] = min(part.sum() / logqk, 1.0)
        wmask = _window_slice(ks, K, window)
        wstats = stats[wmask]
        est = float(wstats.max())
        wmin = float(wstats.min())
        # stability: the later half of the window must reach the estimate
        half = wstats[wstats.size // 2 :]
        stable = float(half.max()) >= est - gap
        stable_all = stable_all and stable
        estimates[eps] = est
        entries.append(
            CriterionEntry(
                name=f"truncation_stat_eps_{eps:g}",
                k_values=ks.copy(),
                statistic=stats,
                window_estimate=est,
                window_min=wmin,
                verdict=VERDICT_INCONCLUSIVE,
                params={"eps": eps, "stable": stable},
            )
        )
    if any(est < 1.0 - gap for est in estimates.values()):
        verdict = VERDICT_HOLDS
    elif all(est > 1.0 - gap for est in estimates.values()) and stable_all:
        verdict = VERDICT_FAILS
    else:
        verdict = VERDICT_INCONCLUSIVE
    for e in entries:
        e.verdict = verdict
    report = CriterionReport(
        entries=entries,
        overall=IN_CLASS if verdict == VERDICT_HOLDS else (
            NOT_IN_CLASS if verdict == VERDICT_FAILS else INCONCLUSIVE
        ),
        params={
            "kind": "condition_b",
            "eps_grid": list(eps_grid),
            "window": window,
            "gap": gap,
            "estimates": {f"{e:g}": est for e, est in estimates.items()},
            "verdict": verdict,
        },
    )
    return report


@dataclass
class KimSeriesTrace:
    """Terms and partial sums of the full-measure criterion series."""

    k_values: np.ndarray
    terms: np.ndarray
    partial_sums: np.ndarray
    slope: float  # least-squares slope of partial sums against ln k (window)
    tail: float  # sum of terms over the last tenth of the index range
    params: dict = field(default_factory=dict)


def kim_series(
    table: ConvergentTable,
    phi,
    K: Optional[int] = None,
    window: float = DEFAULT_WINDOW,
) -> KimSeriesTrace:
    """Terms min(ln phi(q_k), ln(q_{k+1}/q_k)) / phi(q_k) for k up to K.

    phi must be nondecreasing with phi(q_k) >= 1 on the evaluated range;
    leading indices with phi(q_k) < 1 are skipped (q_0 = 1 makes e.g.
    phi = ln start at 0), and a dip below 1 after the start is an error.
    The reported slope is divergence *evidence*, not a proof.
    """
    if K is None:
        K = table.K - 1
    if K > table.K - 1:
        raise ValueError("K exceeds table depth - 1")
    tol = 1e-12
    phis = np.array([float(phi(table.q[k])) for k in range(K + 1)])
    start = 0
    while start <= K and phis[start] < 1.0 - tol:
        start += 1
    if start > K:
        raise SpecError("phi below one on the whole range")
    if np.any(phis[start:] < 1.0 - tol):
        raise SpecError("phi below one after the admissible start")
    ks = np.arange(start, K + 1)
    lr = np.diff(np.asarray(table.logq))[start : K + 1]
    logphi = np.log(np.maximum(phis[start:], 1.0))
    terms = np.minimum(logphi, lr) / phis[start:]
    partial = np.cumsum(terms)
    wmask = _window_slice(ks, K, window)
    x = np.log(np.maximum(ks[wmask], 2))
    y = partial[wmask]
    if x.size >= 2 and float(x.max() - x.min()) > 0:
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = 0.0
    ntail = max(1, ks.size // 10)
    tail = float(terms[-ntail:].sum())
    return KimSeriesTrace(
        k_values=ks,
        terms=terms,
        partial_sums=partial,
        slope=slope,
        tail=tail,
        params={"K": K, "start": int(start), "window": window},
    )


# --- Five classifier statistics -------------------------------------------
#
# Boundedness-type conditions (membership when the statistic stays bounded)
# are judged by comparing the window's two halves: if the later half's max
# does not exceed the earlier half's max by more than the gap factor, the
# statistic is deemed bounded; if it at least doubles, unbounded.
# Unboundedness-type conditions hold when the window minimum clears a large
# threshold, and fail when the statistic is small and non-growing.
# The series-type condition uses the slope of partial sums against ln k.

CLASSIFIER_NAMES = (
    "log_q_over_k",
    "log_q_over_k_log_k",
    "inv_log_q_partial_sum",
    "ratio_over_log_q",
    "log_ratio_over_log_q",
)

_MEMBER_IF_HOLDS = {
    "log_q_over_k": True,
    "log_q_over_k_log_k": False,
    "inv_log_q_partial_sum": False,
    "ratio_over_log_q": True,
    "log_ratio_over_log_q": False,
}


def _halves_ratio(wstats: np.ndarray) -> float:
    h = wstats.size // 2
    first = float(np.max(wstats[:h])) if h > 0 else float(wstats[0])
    second = float(np.max(wstats[h:]))
    if first <= 0:
        return math.inf if second > 0 else 1.0
    return second / first


def _bounded_verdict(wstats, gap):
    if not math.isfinite(float(np.max(wstats))):
        return VERDICT_FAILS
    r = _halves_ratio(wstats)
    if r <= 1.0 + gap:
        return VERDICT_HOLDS
    if r >= 2.0:
        return VERDICT_FAILS
    return VERDICT_INCONCLUSIVE


def _unbounded_verdict(wstats, gap, big):
    if float(wstats.min()) > big:
        return VERDICT_HOLDS
    r = _halves_ratio(wstats)
    if float(wstats.max()) <= big and r <= 1.0 + gap:
        return VERDICT_FAILS
    return VERDICT_INCONCLUSIVE


def classify(
    table: ConvergentTable,
    window: float = DEFAULT_WINDOW,
    gap: float = DEFAULT_GAP,
    big: float = DEFAULT_BIG,
    slope_threshold: float = DEFAULT_SLOPE_THRESHOLD,
) -> CriterionReport:
    """Evaluate the five classifier statistics and derive a verdict.

    Membership precedence: any bounded-type condition holding puts theta in
    the class; any unbounded/series-type condition holding puts it outside;
    a simultaneous confident claim on both sides is a conflict and yields
    "inconclusive" with the conflict flag set.
    """
    K = table.K
    logq = np.asarray(table.logq)
    # first index with q_k >= 2, so ln q_k > 0
    pos = next((k for k in range(K + 1) if table.q[k] >= 2), None)
    if pos is None or K - max(pos, 1) + 1 < MIN_ADMISSIBLE:
        raise SpecError("insufficient depth: need >= 10 admissible indices")

    entries = []

    def add(name, ks, stats, verdict_fn):
        ks = np.asarray(ks)
        stats = np.asarray(stats, dtype=np.float64)
        wmask = _window_slice(ks, K, window)
        wstats = stats[wmask]
        entries.append(
            CriterionEntry(
                name=name,
                k_values=ks,
                statistic=stats,
                window_estimate=float(wstats.max()),
                window_min=float(wstats.min()),
                verdict=verdict_fn(wstats),
                params={"window": window},
            )
        )

    ks = np.arange(1, K + 1)
    add("log_q_over_k", ks, logq[1:] / ks, lambda w: _bounded_verdict(w, gap))

    ks2 = np.arange(2, K + 1)
    add(
        "log_q_over_k_log_k",
        ks2,
        logq[2:] / (ks2 * np.log(ks2)),
        lambda w: _unbounded_verdict(w, gap, big),
    )

    ks3 = np.arange(pos, K + 1)  # q_k >= 2 from pos on (q nondecreasing)
    inv = 1.0 / logq[ks3]
    psums = np.cumsum(inv)

    def series_verdict(wstats):
        # slope of partial sums vs ln k over the window
        wmask = _window_slice(ks3, K, window)
        x = np.log(ks3[wmask].astype(float))
        y = psums[wmask]
        if x.size >= 2 and float(x.max() - x.min()) > 0:
            slope = float(np.polyfit(x, y, 1)[0])
        else:
            slope = 0.0
        series_verdict.slope = slope
        return VERDICT_HOLDS if slope < slope_threshold else VERDICT_FAILS

    add("inv_log_q_partial_sum", ks3, psums, series_verdict)
    entries[-1].params["slope"] = series_verdict.slope

    ksr = ks3[ks3 <= K - 1]
    ratios = np.array([table.ratio_float(int(k)) for k in ksr])
    add(
        "ratio_over_log_q",
        ksr,
        ratios / logq[ksr],
        lambda w: _bounded_verdict(w, gap),
    )

    lr = np.diff(logq)
    add(
        "log_ratio_over_log_q",
        ksr,
        lr[ksr] / logq[ksr],
        lambda w: _unbounded_verdict(w, gap, big),
    )

    member = [e.name for e in entries if _MEMBER_IF_HOLDS[e.name] and e.verdict == VERDICT_HOLDS]
    nonmember = [e.name for e in entries if not _MEMBER_IF_HOLDS[e.name] and e.verdict == VERDICT_HOLDS]
    conflict = bool(member and nonmember)
    if conflict:
        overall = INCONCLUSIVE
    elif member:
        overall = IN_CLASS
    elif nonmember:
        overall = NOT_IN_CLASS
    else:
        overall = INCONCLUSIVE
    return CriterionReport(
        entries=entries,
        overall=overall,
        conflict=conflict,
        params={
            "kind": "classify",
            "window": window,
            "gap": gap,
            "big_threshold": big,
            "slope_threshold": slope_threshold,
            "membership_side": {e.name: _MEMBER_IF_HOLDS[e.name] for e in entries},
        },
    )
