import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from cfcrit import (
    PsiSpec,
    ThetaSpec,
    golden_spec,
    hit_count,
    tail_measure_profile,
    target_union,
    union_bound_tail,
)
from cfcrit._kernels import covered_gridpoints

PSI_HALF = PsiSpec(kind="closed_form", family="const", c=Fraction(1, 2))
PSI_KHINCHIN = PsiSpec(kind="closed_form", family="khinchin_log")
PSI_SQ = PsiSpec(kind="closed_form", family="one_over_q_sq")


class TestTargetUnion:
    def test_psi_half_full_measure(self):
        u = target_union(golden_spec(), PSI_HALF, 1, 20)
        assert u.measure == 1.0

    def test_union_bound_small_constant(self):
        # N arcs of half-length 1/(4N) cover at most 1/2
        N = 50
        psi = PsiSpec(kind="closed_form", family="const", c=Fraction(1, 4 * N))
        u = target_union(golden_spec(), psi, 1, N, bound="nominal")
        assert u.measure <= 0.5 + 1e-12

    def test_matches_rasterization(self):
        # golden ratio, psi = 1/(2q), window [1, 10^4], grid 10^6
        psi = PsiSpec(kind="closed_form", family="one_over_q", c=Fraction(1, 2))
        u = target_union(golden_spec(), psi, 1, 10**4, bound="nominal")
        grid = 10**6
        covered = covered_gridpoints(u.lefts, u.rights, grid)
        assert abs(u.measure - covered / grid) <= 2e-4

    def test_inner_outer_sandwich(self):
        ui = target_union(golden_spec(), PSI_SQ, 1, 100, bound="inner")
        un = target_union(golden_spec(), PSI_SQ, 1, 100, bound="nominal")
        uo = target_union(golden_spec(), PSI_SQ, 1, 100, bound="outer")
        assert ui.measure <= un.measure <= uo.measure

    def test_window_validation(self):
        with pytest.raises(ValueError, match="1 <= Q0 <= Q"):
            target_union(golden_spec(), PSI_SQ, 10, 5)
        with pytest.raises(ValueError, match="delta"):
            target_union(golden_spec(), PSI_SQ, 1, 10, delta=0)
        with pytest.raises(ValueError, match="unknown bound"):
            target_union(golden_spec(), PSI_SQ, 1, 10, bound="middle")


class TestHitCount:
    def test_psi_half_hits_everything(self):
        res = hit_count(golden_spec(), PSI_HALF, 0.37, 100)
        assert res.count == 100 and res.uncertain == []

    def test_psi_zero_hits_nothing(self):
        psi = PsiSpec(kind="closed_form", family="const", c=Fraction(0))
        res = hit_count(golden_spec(), psi, 0.37, 100)
        assert res.count == 0 and res.hits == []

    def test_golden_s0_one_over_q_sq(self):
        # brute-force oracle with 50-digit theta
        res = hit_count(golden_spec(), PSI_SQ, 0.0, 10)
        assert res.hits == [1, 2] and res.count == 2
        with mpmath.workdps(50):
            theta = (1 + mpmath.sqrt(5)) / 2
            brute = []
            for q in range(1, 11):
                d = mpmath.frac(q * theta)
                d = min(d, 1 - d)
                if d < mpmath.mpf(1) / q**2:
                    brute.append(q)
        assert res.hits == brute

    def test_distances_match_oracle(self):
        res = hit_count(golden_spec(), PSI_SQ, 0.25, 50)
        with mpmath.workdps(50):
            theta = (1 + mpmath.sqrt(5)) / 2
            for q in (1, 17, 50):
                d = abs(mpmath.frac(q * theta) - mpmath.mpf(0.25))
                d = min(d, 1 - d)
                assert res.distances[q - 1] == pytest.approx(float(d), abs=1e-12)

    def test_q_validation(self):
        with pytest.raises(ValueError, match="Q must be >= 1"):
            hit_count(golden_spec(), PSI_SQ, 0.0, 0)


class TestMeasureProfile:
    def test_monotone_in_Q(self):
        prof = tail_measure_profile(golden_spec(), PSI_KHINCHIN, 10, [10, 50, 200, 1000])
        assert prof.outer == sorted(prof.outer)
        assert prof.inner == sorted(prof.inner)
        for mi, mo in zip(prof.inner, prof.outer):
            assert mi <= mo

    def test_nonincreasing_in_Q0(self):
        a = tail_measure_profile(golden_spec(), PSI_KHINCHIN, 10, [500]).outer[0]
        b = tail_measure_profile(golden_spec(), PSI_KHINCHIN, 100, [500]).outer[0]
        assert b <= a + 1e-12

    def test_khinchin_tail_fills_circle(self):
        prof = tail_measure_profile(
            golden_spec(), PSI_KHINCHIN, 100, [1000, 10**4, 10**5]
        )
        assert prof.inner[-1] >= 0.9

    def test_borel_cantelli_side(self):
        prof = tail_measure_profile(golden_spec(), PSI_SQ, 100, [10**4])
        bound = union_bound_tail(PSI_SQ, 100, 10**4)
        assert prof.outer[-1] <= bound
        assert bound == pytest.approx(0.02, abs=1e-3)

    def test_checkpoint_validation(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            tail_measure_profile(golden_spec(), PSI_SQ, 10, [100, 100])
        with pytest.raises(ValueError, match=">= Q0"):
            tail_measure_profile(golden_spec(), PSI_SQ, 10, [5, 100])


class TestCrossModule:
    def test_hits_iff_in_union(self):
        theta = ThetaSpec(kind="e_pattern")
        psi = PSI_KHINCHIN
        Q = 2000
        u = target_union(theta, psi, 1, Q, bound="nominal")
        rng = np.random.default_rng(20250823)
        contradictions = 0
        for s in rng.random(200):
            res = hit_count(theta, psi, float(s), Q)
            if res.uncertain:
                continue  # certified-undecidable points are excluded
            inside = u.contains(float(s))
            if (res.count > 0) != inside:
                contradictions += 1
        assert contradictions == 0
