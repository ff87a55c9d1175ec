import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcrbf.dof import (
    RegionTooLargeError,
    as_fraction,
    dof_member,
    dof_multicell,
    dof_region,
    dof_single,
    dof_single_opt,
    dof_support,
    dof_upper_region,
    rbf_is_dof_optimal,
)

F = Fraction
alphas = st.fractions(min_value=0, max_value=12, max_denominator=60)


def test_as_fraction_float_is_decimal():
    assert as_fraction(0.1) == F(1, 10)
    assert as_fraction("3/4") == F(3, 4)


class TestSingle:
    @pytest.mark.parametrize("alpha,M,expected", [(1, 2, 2), (1, 4, F(4, 3)), (0, 2, 0), (0, 5, 0),
                                                  (5, 3, 3), (F(1, 2), 1, 1), (0, 1, 0), (2, 3, 3)])
    def test_values(self, alpha, M, expected):
        assert dof_single(alpha, M) == expected

    @pytest.mark.parametrize("alpha,nt,expected", [(1, 4, (2, 2)), (3, 4, (4, 4)), (1.5, 4, (F(9, 4), 3)),
                                                   (10, 4, (4, 4)), (F(1, 2), 1, (1, 1)), (0, 4, (0, 1))])
    def test_opt(self, alpha, nt, expected):
        assert dof_single_opt(alpha, nt) == expected

    def test_opt_edge_band(self):
        # floor(alpha) + 2 exceeds N_T only at alpha = N_T - 1
        assert dof_single_opt(3, 4) == (4, 4)
        assert dof_single_opt(F(29, 10), 4) == (F(29, 10) * 4 / 3, 4)

    @settings(max_examples=300)
    @given(alphas, st.integers(1, 8))
    def test_opt_is_brute_force_max(self, alpha, nt):
        best = max(dof_single(alpha, m) for m in range(1, nt + 1))
        d, m = dof_single_opt(alpha, nt)
        assert d == best
        assert dof_single(alpha, m) == d
        assert 1 <= m <= nt

    @given(alphas, st.integers(1, 8))
    def test_consistent_with_multicell(self, alpha, M):
        assert dof_single(alpha, M) == dof_multicell([alpha], [M])[0]

    @pytest.mark.parametrize("M", range(2, 9))
    def test_continuity_at_branch(self, M):
        a = F(M - 1)
        eps = F(1, 10**9)
        assert dof_single(a, M) == M
        assert abs(dof_single(a - eps, M) - M) < F(1, 10**8)
        assert dof_single(a + eps, M) == M

    @given(alphas, alphas, st.integers(1, 8))
    def test_opt_monotone(self, a, b, nt):
        lo, hi = sorted((a, b))
        assert dof_single_opt(lo, nt)[0] <= dof_single_opt(hi, nt)[0]

    def test_invalid(self):
        with pytest.raises(ValueError):
            dof_single(-1, 2)
        with pytest.raises(ValueError):
            dof_single_opt(1, 0)


class TestMulticell:
    @pytest.mark.parametrize("alpha,m,expected", [([1, 1], [4, 4], (F(4, 7), F(4, 7))),
                                                  ([1, 1], [2, 0], (2, 0)),
                                                  ([7, 7], [4, 4], (4, 4)),
                                                  ([1, 1], [0, 0], (0, 0))])
    def test_values(self, alpha, m, expected):
        assert dof_multicell(alpha, m) == expected

    def test_mismatch(self):
        with pytest.raises(ValueError):
            dof_multicell([1, 2], [1])


class TestRegion:
    def test_full_box(self):
        r = dof_region([7, 7], 4)
        assert r.hull == ((0, 4), (4, 4), (4, 0))
        assert dof_member(r, (4, 4))
        assert dof_support(r, (1, 1)) == 8

    def test_low_density(self):
        r = dof_region([1, 1], 4)
        assert r.hull == ((0, 2), (2, 0))
        assert dof_support(r, (1, 1)) == 2
        assert not dof_member(r, (4, 4))
        assert dof_member(r, (1, 1))
        assert not dof_member(r, (F(11, 10), 1))

    def test_single_cell_segment(self):
        r = dof_region([F(3, 2)], 4)
        assert dof_member(r, (F(9, 4),))
        assert not dof_member(r, (F(9, 4) + F(1, 100),))

    def test_support_with_silent_cell(self):
        assert dof_support(dof_region([3, F(1, 2)], 4), (1, 0)) == 4

    def test_vertex_order_and_json(self):
        r = dof_region([1, 2], 3)
        ms = [m for m, _ in r.vertices]
        assert ms == sorted(ms) and len(ms) == 16
        doc = json.loads(r.to_json())
        assert doc["schema_version"] == 1 and doc["nt"] == 3
        assert doc["vertices"][0] == {"m": [0, 0], "d": [0, 0]}
        assert doc["hull"][0][0] == 0 and doc["hull"][-1][1] == 0

    def test_origin_always_member(self):
        for alpha in ([0, 0], [1, 3], [F(1, 3), 9]):
            assert dof_member(dof_region(alpha, 3), (0, 0))

    def test_cap(self):
        with pytest.raises(RegionTooLargeError):
            dof_region([1] * 7, 2)
        with pytest.raises(RegionTooLargeError):
            dof_region([1, 1], 9)

    def test_dimension_errors(self):
        r = dof_region([1, 1], 2)
        with pytest.raises(ValueError):
            dof_member(r, (1,))
        with pytest.raises(ValueError):
            dof_support(r, (1, 1, 1))
        with pytest.raises(ValueError):
            dof_support(r, (0, 0))

    @settings(max_examples=40, deadline=None)
    @given(st.tuples(alphas, alphas), st.integers(1, 5), st.integers(0, 10**6))
    def test_convexity_probe(self, alpha, nt, seed):
        r = dof_region(list(alpha), nt)
        pts = r.points
        rng = np.random.default_rng(seed)
        i, j = rng.integers(len(pts), size=2)
        mid = tuple((a + b) / 2 for a, b in zip(pts[i], pts[j]))
        assert dof_member(r, mid)
        for p in pts:
            assert dof_member(r, p)

    @settings(max_examples=40, deadline=None)
    @given(st.tuples(alphas, alphas), st.integers(1, 5))
    def test_hull_is_tight(self, alpha, nt):
        # every hull corner is in the region; pushing it outward leaves it
        r = dof_region(list(alpha), nt)
        for x, y in r.hull:
            assert dof_member(r, (x, y))
            assert not dof_member(r, (x + F(1, 1000), y + F(1, 1000)))

    @settings(max_examples=25, deadline=None)
    @given(st.tuples(alphas, alphas, alphas), st.integers(1, 3), st.integers(0, 10**6))
    def test_lp_membership_three_cells(self, alpha, nt, seed):
        r = dof_region(list(alpha), nt)
        pts = r.points
        rng = np.random.default_rng(seed)
        lam = rng.dirichlet(np.ones(len(pts)))
        inside = np.array([[float(v) for v in p] for p in pts]).T @ lam
        assert dof_member(r, tuple(float(v) * (1 - 1e-7) for v in inside))
        w = rng.uniform(0.1, 1.0, 3)
        h = max(sum(wi * float(di) for wi, di in zip(w, p)) for p in pts)
        # a point beyond the supporting hyperplane is outside
        outside = inside + (h - w @ inside + 1e-3) * w / (w @ w)
        outside = np.maximum(outside, 0)
        assert not dof_member(r, tuple(outside))

    @settings(max_examples=40, deadline=None)
    @given(st.lists(alphas, min_size=1, max_size=3), st.integers(1, 3))
    def test_inside_upper_box(self, alpha, nt):
        r = dof_region(alpha, nt)
        box = dof_upper_region(len(alpha), nt)
        assert all(dof_member(box, p) for p in r.points)

    @settings(max_examples=30, deadline=None)
    @given(st.tuples(alphas, alphas), st.tuples(alphas, alphas), st.integers(1, 4))
    def test_support_monotone_in_alpha(self, a, b, nt):
        lo = [min(x, y) for x, y in zip(a, b)]
        hi = [max(x, y) for x, y in zip(a, b)]
        for w in ((1, 0), (0, 1), (1, 1), (2, 1)):
            assert dof_support(dof_region(lo, nt), w) <= dof_support(dof_region(hi, nt), w)

    def test_support_brute_force(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            alpha = [F(int(v), 3) for v in rng.integers(0, 25, 2)]
            w = [F(int(v), 7) for v in rng.integers(1, 30, 2)]
            brute = max(
                sum(wi * di for wi, di in zip(w, dof_multicell(alpha, m)))
                for m in itertools.product(range(5), repeat=2)
            )
            assert dof_support(dof_region(alpha, 4), w) == brute


class TestUpperBoundAndOptimality:
    def test_box(self):
        box = dof_upper_region(2, 4)
        assert dof_member(box, (4, 4))
        assert not dof_member(box, (F(41, 10), 0))
        assert dof_support(box, (1, 1)) == 8

    def test_optimal_region_equals_box(self):
        cert = rbf_is_dof_optimal([7, 7], 2, 4)
        assert cert and cert.beams == (4, 4) and cert.threshold == 7
        r = dof_region([7, 7], 4)
        box = dof_upper_region(2, 4)
        assert r.hull == box.hull

    def test_single_cell_threshold(self):
        assert rbf_is_dof_optimal(3, 1, 4)
        assert not rbf_is_dof_optimal(F(29, 10), 1, 4)

    def test_zero_threshold_needs_positive_alpha(self):
        assert not rbf_is_dof_optimal(0, 1, 1)
        assert dof_single_opt(0, 1) == (0, 1)
        assert rbf_is_dof_optimal(F(1, 10), 1, 1)
        assert dof_single_opt(F(1, 10), 1) == (1, 1)

    def test_gap(self):
        cert = rbf_is_dof_optimal([1, 1], 2, 4)
        assert not cert
        assert cert.gap == (6, 6) and cert.beams is None

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.data())
    def test_sufficient_condition_gives_box(self, C, nt, data):
        lo = max(F(C * nt - 1), F(1, 100))
        alpha = [data.draw(st.fractions(lo, C * nt + 5)) for _ in range(C)]
        assert rbf_is_dof_optimal(alpha, C, nt)
        r = dof_region(alpha, nt)
        assert dof_member(r, (nt,) * C)
