import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfcrit import ArcUnion
from cfcrit._kernels import (
    _coverage_numpy,
    _merge_numpy,
    backend_name,
    covered_gridpoints,
    merge_sorted,
)

GRID = 10**6


def raster_measure(centers, radii, grid=GRID):
    """Membership mask over the raw arcs on a uniform grid, pre-merge."""
    s = (np.arange(grid) + 0.5) / grid
    mask = np.zeros(grid, dtype=bool)
    for c, r in zip(np.atleast_1d(centers), np.atleast_1d(radii)):
        d = np.abs(s - (c % 1.0))
        d = np.minimum(d, 1.0 - d)
        mask |= d < r
    return mask.mean()


arc_sets = st.lists(
    st.tuples(
        st.floats(min_value=0, max_value=1, exclude_max=True),
        st.floats(min_value=0, max_value=0.3),
    ),
    min_size=0,
    max_size=12,
)


class TestArcUnion:
    def test_empty(self):
        u = ArcUnion.empty()
        assert u.measure == 0.0 and u.arc_count == 0
        assert not u.contains(0.5)

    def test_single_arc(self):
        u = ArcUnion.from_arcs([0.5], [0.1])
        assert u.measure == pytest.approx(0.2, rel=1e-15)
        assert u.contains(0.45) and u.contains(0.59)
        assert not u.contains(0.61)

    def test_wraparound(self):
        u = ArcUnion.from_arcs([0.0], [0.1])
        assert u.measure == pytest.approx(0.2, rel=1e-15)
        assert u.arc_count == 2  # [0, 0.1) and [0.9, 1)
        assert u.contains(0.95) and u.contains(0.05)
        assert not u.contains(0.5)

    def test_overlap_merge(self):
        u = ArcUnion.from_arcs([0.3, 0.35], [0.05, 0.05])
        assert u.arc_count == 1
        assert u.measure == pytest.approx(0.15, rel=1e-12)

    def test_full_circle(self):
        u = ArcUnion.from_arcs([0.2], [0.6])
        assert u.measure == 1.0
        assert u.contains(0.0) and u.contains(0.999)

    def test_zero_radius_dropped(self):
        u = ArcUnion.from_arcs([0.1, 0.5], [0.0, 0.1])
        assert u.arc_count == 1

    def test_negative_radius(self):
        with pytest.raises(ValueError, match="negative radius"):
            ArcUnion.from_arcs([0.1], [-0.1])

    def test_insert_matches_from_arcs(self):
        u = ArcUnion.empty()
        centers = [0.1, 0.4, 0.95]
        radii = [0.05, 0.2, 0.08]
        for c, r in zip(centers, radii):
            u = u.insert(c, r)
        v = ArcUnion.from_arcs(centers, radii)
        np.testing.assert_array_equal(u.lefts, v.lefts)
        np.testing.assert_array_equal(u.rights, v.rights)

    @settings(max_examples=200, deadline=None)
    @given(arc_sets)
    def test_normal_form_order_independent(self, arcs):
        if not arcs:
            return
        centers = [a[0] for a in arcs]
        radii = [a[1] for a in arcs]
        u = ArcUnion.from_arcs(centers, radii)
        v = ArcUnion.from_arcs(centers[::-1], radii[::-1])
        np.testing.assert_array_equal(u.lefts, v.lefts)
        np.testing.assert_array_equal(u.rights, v.rights)
        # incremental insertion reaches the same normal form
        w = ArcUnion.empty()
        for c, r in zip(centers, radii):
            w = w.insert(c, r)
        np.testing.assert_array_equal(u.lefts, w.lefts)

    @settings(max_examples=150, deadline=None)
    @given(arc_sets)
    def test_invariants(self, arcs):
        u = ArcUnion.from_arcs([a[0] for a in arcs], [a[1] for a in arcs])
        assert 0.0 <= u.measure <= 1.0
        # disjoint, sorted, half-open
        assert np.all(u.lefts < u.rights)
        if u.arc_count > 1:
            assert np.all(u.rights[:-1] < u.lefts[1:])

    @settings(max_examples=60, deadline=None)
    @given(arc_sets)
    def test_measure_vs_raster(self, arcs):
        centers = [a[0] for a in arcs]
        radii = [a[1] for a in arcs]
        u = ArcUnion.from_arcs(centers, radii)
        approx = raster_measure(centers, radii, grid=20000)
        # each arc contributes at most 2 boundary cells of error
        tol = 2 * max(1, len(arcs) * 2) / 20000
        assert abs(u.measure - approx) <= tol

    @settings(max_examples=100, deadline=None)
    @given(arc_sets, st.lists(st.floats(min_value=0, max_value=1, exclude_max=True), max_size=10))
    def test_contains_many_matches_scalar(self, arcs, points):
        u = ArcUnion.from_arcs([a[0] for a in arcs], [a[1] for a in arcs])
        got = u.contains_many(np.asarray(points))
        assert got.tolist() == [u.contains(p) for p in points]

    def test_union_operation(self):
        u = ArcUnion.from_arcs([0.1], [0.05])
        v = ArcUnion.from_arcs([0.5], [0.05])
        w = u.union(v)
        assert w.measure == pytest.approx(u.measure + v.measure, rel=1e-12)


class TestKernels:
    def test_backend_reported(self):
        assert backend_name() in ("numba", "numpy")

    @settings(max_examples=100, deadline=None)
    @given(arc_sets)
    def test_merge_backends_agree(self, arcs):
        if not arcs:
            return
        L = np.sort(np.asarray([a[0] for a in arcs]))
        R = L + np.asarray([a[1] for a in arcs])
        lm, rm = merge_sorted(L, R)
        ln, rn = _merge_numpy(L, R)
        np.testing.assert_array_equal(lm, ln)
        np.testing.assert_array_equal(rm, rn)

    def test_coverage_backends_agree(self):
        L = np.array([0.1, 0.5])
        R = np.array([0.2, 0.75])
        assert covered_gridpoints(L, R, 1000) == _coverage_numpy(L, R, 1000)
        assert covered_gridpoints(L, R, 1000) == pytest.approx(350, abs=2)
