"""Target-radius sequences psi and their duals phi(q) = 1/(q psi(q)).

Covers: Khinchin-sequence validation (q * psi(q) nonincreasing plus a
divergence heuristic), the dyadic-block counterexample that admits no
Khinchin minorant, the greatest finite-range Khinchin minorant, step
phi construction from a convergent table, and the dyadic Q_m / kappa_m /
lambda_m diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from gmpy2 import mpz

from .cf import ConvergentTable, SpecError, log_big

E = math.e

PSI_FAMILIES = ("one_over_q", "one_over_q_sq", "khinchin_log", "const")
PHI_FAMILIES = ("log", "log_sq", "const")


@dataclass(frozen=True)
class PhiSpec:
    """Nondecreasing dual view phi(q) = 1/(q psi(q)).

    kind: "closed_form" (family in PHI_FAMILIES with scale c),
    "step" (constant values per block [b_{j-1}, b_j), closed-left /
    open-right; queries past the last breakpoint return the last value),
    or "psi_dual" (wraps a PsiSpec).
    """

    kind: str
    family: str = ""
    c: float = 1.0
    breakpoints: tuple = ()
    values: tuple = ()
    psi: Optional["PsiSpec"] = None

    def __post_init__(self):
        if self.kind == "closed_form" and self.family not in PHI_FAMILIES:
            raise SpecError(f"unknown phi family {self.family!r}")
        if self.kind == "step":
            _check_step(self.breakpoints, self.values)

    def __call__(self, q) -> float:
        if q < 1:
            raise ValueError("domain error: q must be >= 1")
        if self.kind == "closed_form":
            if self.family == "log":
                return self.c * log_big(q)
            if self.family == "log_sq":
                return self.c * log_big(q) ** 2
            return self.c
        if self.kind == "step":
            return float(self.values[_block_index(self.breakpoints, q)])
        return 1.0 / (int(q) * self.psi.value(q))

    def is_nondecreasing(self) -> bool:
        if self.kind == "closed_form":
            return True  # every built-in family is monotone for c > 0
        if self.kind == "step":
            return all(
                self.values[j] <= self.values[j + 1]
                for j in range(len(self.values) - 1)
            )
        return False  # unknown for a generic psi dual; validate via psi


@dataclass(frozen=True)
class PsiSpec:
    """Positive target-radius sequence psi.

    kind: "closed_form" (family in PSI_FAMILIES with scale c), "step"
    (exact Fraction values per block), or "phi_dual" (psi = 1/(q phi(q))).
    """

    kind: str
    family: str = ""
    c: Fraction = Fraction(1)
    breakpoints: tuple = ()
    values: tuple = ()
    phi: Optional[PhiSpec] = None

    def __post_init__(self):
        if self.kind == "closed_form":
            if self.family not in PSI_FAMILIES:
                raise SpecError(f"unknown psi family {self.family!r}")
            if self.c < 0 or (self.c == 0 and self.family != "const"):
                raise SpecError("psi scale must be > 0")
        if self.kind == "step":
            _check_step(self.breakpoints, self.values)
            if any(v <= 0 for v in self.values):
                raise SpecError("psi step values must be > 0")

    def value(self, q):
        """psi(q); exact Fraction for step specs, float otherwise."""
        q = int(q)
        if q < 1:
            raise ValueError("domain error: q must be >= 1")
        if self.kind == "closed_form":
            c = float(self.c)
            if self.family == "one_over_q":
                return c / q
            if self.family == "one_over_q_sq":
                return c / (q * q)
            if self.family == "khinchin_log":
                return c / (q * math.log(q + E))
            return c
        if self.kind == "step":
            return self.values[_block_index(self.breakpoints, q)]
        return 1.0 / (int(q) * self.phi(q))

    def values_array(self, qs: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation on an integer array."""
        qs = np.asarray(qs)
        qf = qs.astype(np.float64)
        if self.kind == "closed_form":
            c = float(self.c)
            if self.family == "one_over_q":
                return c / qf
            if self.family == "one_over_q_sq":
                return c / (qf * qf)
            if self.family == "khinchin_log":
                return c / (qf * np.log(qf + E))
            return np.full(qs.shape, c)
        if self.kind == "step":
            idx = np.searchsorted(np.asarray([float(b) for b in self.breakpoints]), qf, side="right") - 1
            idx = np.clip(idx, 0, len(self.values) - 1)
            vals = np.asarray([float(v) for v in self.values])
            return vals[idx]
        return np.array([1.0 / (int(q) * self.phi(int(q))) for q in qs])


def _check_step(breakpoints, values):
    if len(breakpoints) < 2 or len(values) != len(breakpoints) - 1:
        raise SpecError("step spec needs n+1 breakpoints for n values")
    if breakpoints[0] != 1:
        raise SpecError("step breakpoints must start at 1")
    if any(breakpoints[j] >= breakpoints[j + 1] for j in range(len(breakpoints) - 1)):
        raise SpecError("step breakpoints must be strictly increasing")


def _block_index(breakpoints, q) -> int:
    # closed-left / open-right blocks; clamp past the last breakpoint
    import bisect

    j = bisect.bisect_right(breakpoints, q) - 1
    return min(max(j, 0), len(breakpoints) - 2)


def phi_of(psi: PsiSpec, q) -> float:
    """phi(q) = 1/(q psi(q))."""
    return 1.0 / (int(q) * float(psi.value(q)))


def psi_of(phi: PhiSpec, q) -> float:
    """psi(q) = 1/(q phi(q))."""
    v = phi(q)
    if v <= 0:
        raise ValueError("domain error: phi(q) must be > 0")
    return 1.0 / (int(q) * v)


def dual_phi(psi: PsiSpec) -> PhiSpec:
    return PhiSpec(kind="psi_dual", psi=psi)


def dual_psi(phi: PhiSpec) -> PsiSpec:
    return PsiSpec(kind="phi_dual", phi=phi)


@dataclass
class KhinchinReport:
    monotone_ok: bool
    first_violation: Optional[int]
    partial_sum: float
    divergence_slope: float
    divergence_evidence: bool  # heuristic, never a proof
    checked_to: int


GRID_CAP = 10**6
SLOPE_THRESHOLD = 0.05


def khinchin_validate(psi: PsiSpec, Q: int) -> KhinchinReport:
    """Check q*psi(q) monotonicity and report divergence evidence for sum(psi).

    Monotonicity is exact for step and phi-dual specs; closed forms are
    checked on every integer up to min(Q, 1e6).  Divergence evidence is the
    least-squares slope of partial sums against ln Q over geometric
    checkpoints, compared against a 0.05 threshold.
    """
    if Q < 10:
        raise ValueError("Q must be >= 10")
    monotone_ok, first_violation = _monotone_check(psi, Q)

    Qc = min(Q, GRID_CAP)
    qs = np.arange(1, Qc + 1)
    vals = psi.values_array(qs)
    psums = np.cumsum(vals)
    checkpoints = np.unique(
        np.geomspace(max(10, Qc // 100), Qc, 12).astype(np.int64)
    )
    x = np.log(checkpoints.astype(float))
    y = psums[checkpoints - 1]
    slope = float(np.polyfit(x, y, 1)[0]) if x.size >= 2 else 0.0
    return KhinchinReport(
        monotone_ok=monotone_ok,
        first_violation=first_violation,
        partial_sum=float(psums[-1]),
        divergence_slope=slope,
        divergence_evidence=slope > SLOPE_THRESHOLD,
        checked_to=int(Qc),
    )


def _monotone_check(psi: PsiSpec, Q: int):
    """Is q -> q*psi(q) nonincreasing on [1, Q]? Exact where representable."""
    if psi.kind == "step":
        # within a constant block, q*psi strictly increases, so any block
        # containing two integers <= Q is an immediate violation
        bps = list(psi.breakpoints)
        for j in range(len(psi.values)):
            lo, hi = bps[j], min(bps[j + 1] - 1, Q)
            if hi > lo:
                return False, int(lo + 1)
            if lo > Q:
                break
            # boundary into the next block
            if j + 1 < len(psi.values) and bps[j + 1] <= Q:
                if Fraction(bps[j + 1]) * Fraction(psi.values[j + 1]) > Fraction(hi) * Fraction(psi.values[j]):
                    return False, int(bps[j + 1])
        if Q >= bps[-1]:  # clamped tail keeps the last constant value
            if bps[-1] + 1 <= Q:
                return False, int(bps[-1] + 1)
        return True, None
    if psi.kind == "phi_dual":
        # q*psi = 1/phi; nonincreasing iff phi nondecreasing
        phi = psi.phi
        if phi.kind in ("closed_form", "step"):
            ok = phi.is_nondecreasing()
            return ok, None if ok else 0
        psi = dual_psi(phi)  # fall through to the grid check
    Qc = min(Q, GRID_CAP)
    qs = np.arange(1, Qc + 1)
    t = qs.astype(np.float64) * psi.values_array(qs)
    bad = np.flatnonzero(t[1:] > t[:-1] * (1 + 1e-12))
    if bad.size:
        return False, int(qs[bad[0] + 1])
    return True, None


def dyadic_block_psi(n: Sequence[int]) -> PsiSpec:
    """Step psi(q) = 2^(-n_k) on [2^(n_{k-1}), 2^(n_k)), n_0 = 0.

    Requires n strictly increasing with n_k - n_{k-1} >= k.  The resulting
    psi is decreasing with divergent sum, yet admits no Khinchin minorant;
    each block sums to exactly 1 - 2^(n_{k-1} - n_k).
    """
    n = list(n)
    if len(n) < 2 or n[0] != 0:
        raise SpecError("invalid gap sequence: need n_0 = 0 and at least n_1")
    for k in range(1, len(n)):
        if n[k] - n[k - 1] < k:
            raise SpecError(
                f"invalid gap sequence: n_{k} - n_{k - 1} = {n[k] - n[k - 1]} < {k}"
            )
    breakpoints = tuple(2 ** nk for nk in n)
    values = tuple(Fraction(1, 2 ** n[k]) for k in range(1, len(n)))
    return PsiSpec(kind="step", breakpoints=breakpoints, values=values)


def block_sums(psi: PsiSpec) -> list[Fraction]:
    """Exact sum of psi over each step block [b_{j-1}, b_j)."""
    if psi.kind != "step":
        raise SpecError("block_sums requires a step spec")
    return [
        (Fraction(psi.breakpoints[j + 1]) - Fraction(psi.breakpoints[j])) * Fraction(psi.values[j])
        for j in range(len(psi.values))
    ]


@dataclass
class MinorantResult:
    """g(q) = min over q <= q' <= Q of q' psi(q'), for q = 1..Q."""

    g: np.ndarray
    sum_g_over_q: float
    partial_sums: np.ndarray  # cumulative sums of g(q)/q


def greatest_khinchin_minorant(psi: PsiSpec, Q: int) -> MinorantResult:
    """Largest nonincreasing minorant of q*psi(q) on [1, Q] (suffix minimum).

    g/q is the largest candidate with q*(g(q)/q) nonincreasing that stays
    below psi on the range; bounded partial sums of g(q)/q are the finite
    observable for the nonexistence of a Khinchin minorant.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    qs = np.arange(1, Q + 1)
    t = qs.astype(np.float64) * psi.values_array(qs)
    g = np.minimum.accumulate(t[::-1])[::-1]
    ratios = g / qs
    partial = np.cumsum(ratios)
    return MinorantResult(g=g, sum_g_over_q=float(partial[-1]), partial_sums=partial)


def phi_step_from_indices(table: ConvergentTable, k_seq: Sequence[int]) -> PhiSpec:
    """Step phi with phi(q) = ln q_{k_n} on [q_{k_{n-1}}, q_{k_n}).

    k_seq must start at 0, strictly increase, stay within the table, and
    satisfy q_{k_1} >= 3 so that phi >= ln 3 > 1.  The dual psi has
    q*psi = 1/phi nonincreasing by construction.
    """
    k_seq = list(k_seq)
    if len(k_seq) < 2 or k_seq[0] != 0:
        raise SpecError("invalid index sequence: need k_0 = 0 and length >= 2")
    if any(k_seq[i] >= k_seq[i + 1] for i in range(len(k_seq) - 1)):
        raise SpecError("invalid index sequence: must be strictly increasing")
    if k_seq[-1] > table.K:
        raise SpecError("invalid index sequence: exceeds table depth")
    if table.q[k_seq[1]] < 3:
        raise SpecError("invalid index sequence: need q_{k_1} >= 3")
    breakpoints = tuple(int(table.q[k]) for k in k_seq)
    values = tuple(float(table.logq[k]) for k in k_seq[1:])
    return PhiSpec(kind="step", breakpoints=breakpoints, values=values)


@dataclass
class DyadicRecord:
    m: int
    Q_m: int
    kappa: float
    lam: Optional[float]
    s_count: int  # #{k in S : q_k <= Q_m}
    t_log_sum: float  # sum over k in T, q_k <= Q_m of ln(q_{k+1}/q_k)


@dataclass
class DyadicDiagnostics:
    records: list[DyadicRecord]
    S: list[int]
    T: list[int]
    ties: list[int]  # indices assigned to S on an equality within tolerance


TIE_RTOL = 1e-9


def split_growth_indices(table: ConvergentTable, phi: PhiSpec):
    """Partition k = 0..K-1 into S = {phi(q_k) <= q_{k+1}/q_k} and T.

    The comparison is exact: the float phi value is promoted to a rational
    and compared with the exact convergent ratio.  Near-ties (within 1e-9
    relative) are assigned to S and flagged.
    """
    S, T, ties = [], [], []
    for k in range(table.K):
        pv = phi(table.q[k])
        num, den = float(pv).as_integer_ratio()
        lhs = mpz(num) * table.q[k]
        rhs = mpz(den) * table.q[k + 1]
        in_s = lhs <= rhs
        # near-tie detection on the certified float side
        ratio = table.ratio_float(k)
        if math.isfinite(ratio) and abs(pv - ratio) <= TIE_RTOL * max(1.0, abs(pv)):
            ties.append(k)
            in_s = True
        (S if in_s else T).append(k)
    return S, T, ties


def _largest_q_with_phi_le(phi: PhiSpec, bound: float, q_max) -> Optional[int]:
    """Largest integer Q in [1, q_max] with phi(Q) <= bound, via bisection."""
    if phi(1) > bound:
        return None
    lo, hi = mpz(1), mpz(q_max)
    if phi(hi) <= bound:
        return int(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if phi(mid) <= bound:
            lo = mid
        else:
            hi = mid
    return int(lo)


def dyadic_diagnostics(table: ConvergentTable, phi: PhiSpec, m_max: int) -> DyadicDiagnostics:
    """Per-m records: Q_m (largest integer with phi(Q_m) <= 2^m, capped at
    the table range maximum q_K), kappa_m, lambda_m and the S-mass they
    weigh.  Q_m is nondecreasing in m."""
    S, T, ties = split_growth_indices(table, phi)
    Sset = set(S)
    lr = np.diff(np.asarray(table.logq))
    records = []
    q_max = table.q[table.K]
    for m in range(m_max + 1):
        Qm = _largest_q_with_phi_le(phi, float(2**m), q_max)
        if Qm is None:
            continue
        s_count = sum(1 for k in S if table.q[k] <= Qm)
        t_log_sum = float(sum(lr[k] for k in T if table.q[k] <= Qm))
        kappa = (m / 2.0**m) * s_count
        if Qm >= 2:
            lam = (m * s_count + t_log_sum) / log_big(Qm)
        else:
            lam = None
        records.append(
            DyadicRecord(m=m, Q_m=Qm, kappa=kappa, lam=lam, s_count=s_count, t_log_sum=t_log_sum)
        )
    return DyadicDiagnostics(records=records, S=S, T=T, ties=ties)
