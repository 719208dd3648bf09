"""Category functions, structural checks, sample streams and expressions."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctm.core import (BOUNDARY, POSITIVE, SIGNED, Box, GainLoss, HalfPlanes,
                      PredicateCategories, SingleCategory, Verdict, as_alternative,
                      check_category_definition, frontier_point)
from ctm.errors import ConsistencyError, ConstructionError, DomainError
from ctm.expr import compile_expression
from ctm.salience import SIGMA_BGS, categories_from_salience
from ctm.sampling import SampleBudget, SampleStream

coord = st.floats(1.0, 20.0, allow_nan=False)
point = st.tuples(coord, coord)


class TestAlternatives:
    def test_valid_point_is_a_float_tuple(self):
        assert as_alternative([1, 2]) == (1.0, 2.0)

    @pytest.mark.parametrize("bad", [(1.0,), (1.0, 2.0, 3.0), ("a", 1.0), (math.nan, 1.0),
                                     (math.inf, 1.0)])
    def test_malformed_rejected(self, bad):
        with pytest.raises(DomainError):
            as_alternative(bad)

    def test_positive_domain(self):
        with pytest.raises(DomainError):
            as_alternative((-1.0, 2.0), POSITIVE)
        assert as_alternative((-1.0, 2.0), SIGNED) == (-1.0, 2.0)

    def test_degenerate_box(self):
        with pytest.raises(DomainError):
            Box(1.0, 1.0, 1.0, 2.0)

    def test_box_point_maps_unit_square(self):
        box = Box(0.0, 10.0, 2.0, 20.0)
        assert box.point(0.0, 0.0) == (0.0, 10.0)
        assert box.point(1.0, 1.0) == (2.0, 20.0)
        assert box.point(0.5, 0.5) == (1.0, 15.0)


class TestGainLoss:
    catfn = GainLoss()

    @pytest.mark.parametrize("x, k", [((12, 12), 1), ((9, 16), 2), ((12, 9), 3), ((9, 9), 4)])
    def test_sign_patterns(self, x, k):
        assert self.catfn.classify(x, (10, 10)) == k

    def test_frontier_is_boundary(self):
        assert self.catfn.classify((10, 12), (10, 10)) is BOUNDARY

    def test_labels(self):
        assert str(self.catfn.category(1)) == "K1(gain-gain)"
        assert self.catfn.m == 4

    @given(point, point)
    def test_classify_is_pure(self, x, r):
        assert self.catfn.classify(x, r) == self.catfn.classify(x, r)

    @given(point, point)
    def test_matches_sign_pattern(self, x, r):
        k = self.catfn.classify(x, r)
        d1, d2 = x[0] - r[0], x[1] - r[1]
        if abs(d1) <= 1e-9 or abs(d2) <= 1e-9:
            assert k is BOUNDARY
        else:
            assert k == {(True, True): 1, (False, True): 2,
                         (True, False): 3, (False, False): 4}[(d1 > 0, d2 > 0)]

    def test_structure_passes(self):
        report = check_category_definition(GainLoss(domain_box=Box.square(1, 20)),
                                           SampleBudget(10_000, seed=0))
        assert report.passed
        assert set(report.verdicts) == {"disjoint", "dense", "open", "ref_continuity"}


@pytest.mark.parametrize("catfn", [
    GainLoss(),
    HalfPlanes(1.0, -1.0),
    categories_from_salience(SIGMA_BGS),
], ids=["gain-loss", "half-planes", "salience"])
class TestOpenness:
    @settings(max_examples=60, deadline=None)
    @given(u=st.tuples(*[st.floats(0.02, 0.98)] * 4), ang=st.floats(0, 2 * math.pi),
           frac=st.floats(0.0, 0.99))
    def test_ball_within_frontier_distance(self, catfn, u, ang, frac):
        box = catfn.domain_box
        x, r = box.point(u[0], u[1]), box.point(u[2], u[3])
        k = catfn._classify(x, r)
        if k is BOUNDARY:
            return
        d = catfn.frontier_distance(x, r) * frac
        p = (x[0] + d * math.cos(ang), x[1] + d * math.sin(ang))
        if catfn.domain.contains(p):
            assert catfn._classify(p, r) == k


class TestStructuralChecks:
    def test_bgs_categories_pass(self):
        catfn = categories_from_salience(SIGMA_BGS, domain_box=Box.square(0.5, 5.0))
        assert check_category_definition(catfn, SampleBudget(10_000, seed=0)).passed

    def test_overlapping_sets_fail_disjointness(self):
        broken = PredicateCategories([lambda x, r: x[0] - r[0], lambda x, r: x[1] - r[1]],
                                     domain_box=Box.square(1, 10))
        report = check_category_definition(broken, SampleBudget(2000, seed=0))
        v = report.verdicts["disjoint"]
        assert v.failed
        x, r = v.witness["x"], v.witness["r"]
        assert x[0] > r[0] and x[1] > r[1]

    def test_overlap_raises_on_classify(self):
        broken = PredicateCategories([lambda x, r: 1.0, lambda x, r: 1.0])
        with pytest.raises(ConsistencyError):
            broken.classify((1, 1), (1, 1))

    def test_single_category(self):
        catfn = SingleCategory()
        assert catfn.classify((3, 4), (1, 1)) == 1
        assert check_category_definition(catfn, SampleBudget(1000)).passed

    def test_frontier_point_bisects(self):
        catfn = HalfPlanes(1.0, 0.0)
        p = frontier_point(catfn, (1.0, 1.0), (3.0, 1.0), (2.0, 2.0))
        assert p is not None and abs(p[0] - 2.0) < 1e-9


class TestVerdict:
    def test_constructors(self):
        assert Verdict.ok(3).passed and str(Verdict.ok(3)) == "PASS(3)"
        fail = Verdict.fail(2, {"x": (1, 2)})
        assert fail.failed and fail.witness == {"x": (1, 2)}
        assert not Verdict.not_tested().passed and not Verdict.not_tested().failed


class TestSampleStream:
    def test_prefix_stable(self):
        a = SampleStream(3, "label", 4).take(1500)
        b = SampleStream(3, "label", 4).take(3000)
        assert a == b[:1500]

    def test_labels_are_independent(self):
        a = np.array(SampleStream(3, "one", 2).take(100))
        b = np.array(SampleStream(3, "two", 2).take(100))
        assert not np.allclose(a, b)

    def test_uniform_range(self):
        rows = np.array(SampleStream(0, "u", 3).take(5000))
        assert rows.min() >= 0 and rows.max() < 1
        assert abs(rows.mean() - 0.5) < 0.02

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            SampleBudget(0)
        with pytest.raises(ValueError):
            SampleBudget(10, tolerance=0.0)


class TestExpressions:
    def test_arithmetic_and_functions(self):
        f = compile_expression("abs(a - b) / (abs(a) + abs(b)) + max(a, b) ** 0 - sqrt(4)",
                               ("a", "b"))
        assert f(8.0, 6.0) == pytest.approx(2 / 14 + 1 - 2)

    def test_pow_and_min(self):
        f = compile_expression("pow(x1, 2) + min(x1, x2)", ("x1", "x2"))
        assert f(3.0, 1.0) == 10.0

    @pytest.mark.parametrize("src", ["__import__('os')", "a.b", "a if b else 1", "c + 1",
                                     "[a]", "a +"])
    def test_rejects_unsafe_or_unknown(self, src):
        with pytest.raises(ConstructionError):
            compile_expression(src, ("a", "b"))
