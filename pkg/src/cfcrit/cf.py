"""Exact continued-fraction machinery.

Partial quotients are generated from a :class:`ThetaSpec`, convergents are
built with exact integer arithmetic (gmpy2), and fractional parts of integer
multiples of theta come with certified error bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from gmpy2 import mpq, mpz

LN2 = math.log(2.0)

DEFAULT_BIT_CAP = 10**6


class SpecError(ValueError):
    """Invalid theta/psi specification or malformed input."""


class InsufficientPrecision(RuntimeError):
    """A convergent table cannot be extended to the required depth."""


# Named growth rules: (k, q_k) -> a_{k+1}.  Must be deterministic.
GROWTH_RULES: dict[str, Callable[[int, "mpz"], "mpz"]] = {
    "qk_pow_k": lambda k, qk: qk**k,
    "qk_squared": lambda k, qk: qk * qk,
}

# Conservative upper bound on bit_length of the rule output, used to fail
# before a doubly-exponential power is materialized.
_RULE_BIT_ESTIMATE: dict[str, Callable[[int, int], int]] = {
    "qk_pow_k": lambda k, bits: k * bits,
    "qk_squared": lambda k, bits: 2 * bits,
}


@dataclass(frozen=True)
class ThetaSpec:
    """Rule generating the partial quotients of an irrational theta.

    kind is one of "explicit", "periodic", "e_pattern", "growth_rule".
    a_0 >= 0 is allowed; every a_k for k >= 1 must be >= 1.
    """

    kind: str
    quotients: tuple[int, ...] = ()
    preperiod: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    rule: str = ""
    bit_cap: int = DEFAULT_BIT_CAP

    def __post_init__(self):
        if self.kind not in ("explicit", "periodic", "e_pattern", "growth_rule"):
            raise SpecError(f"unknown theta kind {self.kind!r}")
        if self.kind == "explicit" and not self.quotients:
            raise SpecError("explicit spec requires quotients")
        if self.kind == "periodic" and not self.period:
            raise SpecError("periodic spec requires a nonempty period")
        if self.kind == "growth_rule":
            if self.rule not in GROWTH_RULES:
                raise SpecError(f"unknown growth rule {self.rule!r}")
            if len(self.preperiod) < 2:
                raise SpecError("growth rule requires a preperiod of length >= 2")

    @property
    def extendable(self) -> bool:
        return self.kind != "explicit"


def golden_spec() -> ThetaSpec:
    """theta = [1; 1, 1, ...], the golden ratio."""
    return ThetaSpec(kind="periodic", preperiod=(1,), period=(1,))


def _e_pattern(K: int) -> list[int]:
    # [2; 1, 2, 1, 1, 4, 1, 1, 6, 1, ...]: blocks (1, 2j, 1) for j = 1, 2, ...
    a = [2]
    j = 1
    while len(a) <= K:
        a.extend((1, 2 * j, 1))
        j += 1
    return a[: K + 1]


def _check_quotient(ak, k: int):
    if k == 0:
        if ak < 0:
            raise SpecError("invalid quotient: a_0 must be >= 0")
    elif ak < 1:
        raise SpecError(f"invalid quotient: a_{k} = {ak} < 1")


def _growth_expand(spec: ThetaSpec, K: int):
    """Quotients and denominators for a growth rule, in one pass.

    The rule reads q_k, so the denominator recurrence is interleaved; the
    bit-size of the next quotient is estimated first so a doubly
    exponential rule fails loudly instead of exhausting memory.
    """
    a = [mpz(x) for x in spec.preperiod[: K + 1]]
    for k, ak in enumerate(a):
        _check_quotient(ak, k)
    rule = GROWTH_RULES[spec.rule]
    estimate = _RULE_BIT_ESTIMATE[spec.rule]
    q = [mpz(1)]
    for k in range(1, len(a)):
        q.append(a[k] * q[-1] + (q[-2] if k >= 2 else mpz(0)))
    k = len(a) - 1
    while k < K:
        if estimate(k, q[-1].bit_length()) > spec.bit_cap:
            raise SpecError(
                f"quotient bit-size cap exceeded at a_{k + 1} "
                f"(cap {spec.bit_cap} bits)"
            )
        ak1 = rule(k, q[-1])
        if ak1 < 1:
            raise SpecError(f"invalid quotient: rule gave a_{k + 1} = {ak1}")
        a.append(ak1)
        q.append(ak1 * q[-1] + (q[-2] if k >= 1 else mpz(0)))
        k += 1
    return a, q


def expand_theta(spec: ThetaSpec, K: int) -> list:
    """Return the partial quotients a_0..a_K (length K + 1)."""
    if K < 1:
        raise SpecError("K must be >= 1")
    if spec.kind == "explicit":
        if len(spec.quotients) < K + 1:
            raise SpecError(
                f"insufficient quotients: have {len(spec.quotients)}, need {K + 1}"
            )
        a = list(spec.quotients[: K + 1])
    elif spec.kind == "periodic":
        a = list(spec.preperiod)
        i = 0
        while len(a) <= K:
            a.append(spec.period[i % len(spec.period)])
            i += 1
        a = a[: K + 1]
    elif spec.kind == "e_pattern":
        a = _e_pattern(K)
    else:  # growth_rule: needs q_k to produce a_{k+1}
        return _growth_expand(spec, K)[0]
    for k, ak in enumerate(a):
        _check_quotient(ak, k)
    return a


@dataclass(frozen=True)
class ConvergentTable:
    """Exact convergents p_k/q_k with cached ln q_k.

    Immutable after construction; safe to share across threads.
    Numerators are optional (skipped for very deep growth-rule tables where
    only the denominators feed the criteria).
    """

    a: tuple
    q: tuple
    p: Optional[tuple]
    logq: tuple[float, ...]

    @property
    def K(self) -> int:
        return len(self.a) - 1

    def log_ratio(self, i: int) -> float:
        """ln(q_{i+1}/q_i)."""
        return self.logq[i + 1] - self.logq[i]

    def log_ratios(self):
        import numpy as np

        return np.diff(np.asarray(self.logq))

    def ratio_float(self, i: int) -> float:
        """q_{i+1}/q_i rounded from the exact rational (inf on overflow).

        Beyond ~1M-bit denominators the exact division is skipped in favor
        of exp of the log difference; at that scale the ratio is either
        astronomically large or the 1e-12-relative logs are ample.
        """
        if self.q[i + 1].bit_length() > 2**20:
            d = self.logq[i + 1] - self.logq[i]
            return math.exp(d) if d < 709.0 else math.inf
        try:
            return float(mpq(self.q[i + 1], self.q[i]))
        except OverflowError:
            return math.inf


def log_big(n) -> float:
    """ln n for an arbitrary-precision positive integer, <= 1e-12 relative.

    Uses bit-length plus a 64-bit top mantissa so values far beyond the
    native float range are handled.
    """
    n = mpz(n)
    if n <= 0:
        raise ValueError("domain error: log_big requires n >= 1")
    bits = n.bit_length()
    if bits <= 63:
        return math.log(int(n))
    shift = bits - 64
    mant = int(n >> shift)
    return math.log(mant) + shift * LN2


def build_convergents(
    a: Sequence, numerators: bool = True, _q: Optional[list] = None
) -> ConvergentTable:
    """Build the exact convergent table for the quotients a_0..a_K."""
    if len(a) == 0:
        raise SpecError("no quotients")
    aa = tuple(mpz(x) for x in a)
    for k, ak in enumerate(aa):
        _check_quotient(ak, k)
    q = _q if _q is not None else None
    if q is None:
        q = [mpz(1)]
        qm1 = mpz(0)
        for k in range(1, len(aa)):
            q.append(aa[k] * q[-1] + qm1)
            qm1 = q[-2]
    p = None
    if numerators:
        p = [aa[0]]
        pm1 = mpz(1)
        for k in range(1, len(aa)):
            p.append(aa[k] * p[-1] + pm1)
            pm1 = p[-2]
    logq = tuple(log_big(x) for x in q)
    return ConvergentTable(a=aa, q=tuple(q), p=tuple(p) if p is not None else None, logq=logq)


def table_for(spec: ThetaSpec, K: int, numerators: bool = True) -> ConvergentTable:
    if spec.kind == "growth_rule":
        a, q = _growth_expand(spec, K)
        return build_convergents(a, numerators=numerators, _q=q)
    return build_convergents(expand_theta(spec, K), numerators=numerators)


def _tail_error_den(table: ConvergentTable):
    # |theta - p_K/q_K| <= 1/(q_K * q_{K+1}) < 1/(q_K * (q_K + q_{K-1})),
    # certified from the table alone since q_{K+1} >= q_K + q_{K-1}.
    K = table.K
    if K == 0:
        return mpz(1)
    return table.q[K] * (table.q[K] + table.q[K - 1])


def ensure_depth(
    spec: ThetaSpec,
    table: Optional[ConvergentTable],
    min_qq,
    numerators: bool = True,
) -> ConvergentTable:
    """Return a table with q_K * (q_K + q_{K-1}) >= min_qq, extending if needed."""
    if table is not None and _tail_error_den(table) >= min_qq:
        return table
    K = table.K if table is not None else 8
    while True:
        K = max(2 * K, 8)
        if not spec.extendable:
            K = min(K, len(spec.quotients) - 1)
        try:
            table = table_for(spec, K, numerators=numerators)
        except SpecError as e:
            raise InsufficientPrecision(f"insufficient precision: {e}") from e
        if _tail_error_den(table) >= min_qq:
            return table
        if not spec.extendable and K >= len(spec.quotients) - 1:
            raise InsufficientPrecision(
                "insufficient precision: explicit quotient list exhausted"
            )


@dataclass(frozen=True)
class CirclePoint:
    """A point of the unit circle [0, 1) with a certified absolute error."""

    value: float
    error_bound: float

    def __post_init__(self):
        if not (0.0 <= self.value < 1.0):
            raise ValueError("circle point out of [0, 1)")
        if self.error_bound < 0.0:
            raise ValueError("negative error bound")


# Slack for the final rational -> float rounding.
ROUNDING_EPS = 2.0**-50


def frac_multiple(
    table: ConvergentTable,
    q: int,
    delta: float,
    spec: Optional[ThetaSpec] = None,
) -> CirclePoint:
    """q * theta mod 1 with certified absolute error <= delta + rounding.

    The table must be deep enough that q / (q_K q_{K+1}) <= delta; if a spec
    is supplied and extendable, the table is deepened transparently (the
    extended table is discarded; callers doing bulk work should pre-extend
    with :func:`ensure_depth`).
    """
    if q < 0:
        raise ValueError("domain error: q must be >= 0")
    if q == 0:
        return CirclePoint(0.0, 0.0)
    if delta <= 0:
        raise ValueError("domain error: delta must be > 0")
    need = mpz(math.ceil(q / delta))
    if _tail_error_den(table) < need:
        if spec is None:
            raise InsufficientPrecision(
                "insufficient precision: table too shallow and no spec to extend"
            )
        table = ensure_depth(spec, table, need, numerators=True)
    if table.p is None:
        raise InsufficientPrecision(
            "insufficient precision: table lacks numerators"
        )
    K = table.K
    r = (mpz(q) * table.p[K]) % table.q[K]
    value = float(mpq(r, table.q[K]))
    if value >= 1.0:
        value = math.nextafter(1.0, 0.0)
    err = q / float(_tail_error_den(table)) + ROUNDING_EPS
    return CirclePoint(value, err)


def multiples_mod_one(table: ConvergentTable, q_max: int):
    """Fractional parts of q*theta for q = 1..q_max as a float array.

    Each entry is the exact residue (q p_K mod q_K)/q_K rounded to float;
    the caller is responsible for checking the table depth (ensure_depth).
    """
    import numpy as np

    if table.p is None:
        raise InsufficientPrecision("insufficient precision: table lacks numerators")
    K = table.K
    pK, qK = table.p[K] % table.q[K], table.q[K]
    out = np.empty(q_max, dtype=np.float64)
    r = mpz(0)
    if qK.bit_length() <= 900:
        inv = 1.0 / float(qK)
        for i in range(q_max):
            r += pK
            if r >= qK:
                r -= qK
            out[i] = float(r) * inv
    else:
        for i in range(q_max):
            r += pK
            if r >= qK:
                r -= qK
            out[i] = float(mpq(r, qK))
    # float(r) * inv adds at most ~2 ulp; fold into the caller's delta budget.
    np.clip(out, 0.0, math.nextafter(1.0, 0.0), out=out)
    return out
