"""Salience functions, the categories they generate, and S0-S6."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctm.core import BOUNDARY, Box, GainLoss
from ctm.errors import ArityError, ConstructionError, DomainError, PreconditionError
from ctm.salience import (S1, S2, S3, S4, SIGMA_BGS, SIGMA_BGS_SIGNED, SIGMA_RATIO,
                          categories_from_salience, check_S_properties,
                          check_salience_properties, get_salience,
                          hod_category_equivalence, is_hod, replay_s_witness)
from ctm.sampling import SampleBudget

pos = st.floats(0.1, 10.0, allow_nan=False)
pair = st.tuples(pos, pos)


class TestSalienceValues:
    def test_bgs_value(self):
        assert SIGMA_BGS(8, 6) == pytest.approx(2 / 14, abs=1e-15)

    @given(pos)
    def test_bgs_grounded(self, a):
        assert SIGMA_BGS(a, a) == 0.0

    def test_unsigned_rejects_negative(self):
        with pytest.raises(DomainError):
            SIGMA_BGS(-1.0, 2.0)

    def test_signed_accepts_prices(self):
        assert SIGMA_BGS_SIGNED(-2.0, -9.0) == pytest.approx(7 / 11)

    def test_expression_salience(self):
        sigma = get_salience("abs(a - b) / (a + b)")
        assert sigma(8, 6) == pytest.approx(2 / 14)

    def test_unknown_id_is_compiled_and_checked(self):
        with pytest.raises(ConstructionError):
            get_salience("zzz")

    @settings(max_examples=200)
    @given(pos, pos, st.floats(0.01, 100.0))
    def test_hod_builtins_scale_free(self, a, b, alpha):
        for sigma in (SIGMA_BGS, SIGMA_RATIO):
            assert sigma.fn(alpha * a, alpha * b) == pytest.approx(sigma.fn(a, b), rel=1e-9)

    def test_hod_spot_checks(self):
        assert is_hod(SIGMA_BGS) and is_hod(SIGMA_RATIO)
        assert not is_hod(S2) and not is_hod(S3)


class TestSalienceProperties:
    def test_bgs_all_pass(self):
        report = check_salience_properties(SIGMA_BGS, SampleBudget(6000, seed=0))
        assert report.passed
        assert set(report.verdicts) == {"ordering", "continuity", "symmetry", "grounded",
                                        "HOD", "dimin_sens"}

    def test_s1_not_grounded(self):
        v = check_salience_properties(S1, SampleBudget(6000, seed=0)).verdicts["grounded"]
        assert v.failed
        a, b = v.witness["a"], v.witness["b"]
        # s1(a, a) = a, so two diagonal points disagree
        assert S1.fn(a, a) == pytest.approx(a) and S1.fn(b, b) == pytest.approx(b) and a != b

    def test_s2_hod_and_diminishing_sensitivity(self):
        report = check_salience_properties(S2, SampleBudget(6000, seed=0))
        assert report.verdicts["HOD"].failed
        w = report.verdicts["dimin_sens"].witness
        assert (w["a"], w["b"], w["eps"]) == (2.0, 1.0, 1.0)


class TestGeneratedCategories:
    catfn = categories_from_salience(SIGMA_BGS_SIGNED, domain_box=Box(-12, 4, -1, 10))

    def test_price_salient(self):
        assert self.catfn.classify((-2, 6.9), (-9, 6)) == 1
        assert self.catfn.gap((-2, 6.9), (-9, 6)) == pytest.approx(7 / 11 - 0.9 / 12.9)

    def test_quality_salient(self):
        assert self.catfn.classify((-8, 8), (-9, 6)) == 2

    def test_equal_salience_is_boundary(self):
        assert categories_from_salience(SIGMA_BGS).classify((4, 4), (2, 2)) is BOUNDARY

    @given(pair, pair)
    def test_reflection_swaps_categories(self, x, r):
        catfn = categories_from_salience(SIGMA_BGS)
        k = catfn.classify(x, r)
        kr = catfn.classify(x[::-1], r[::-1])
        if k is BOUNDARY:
            assert kr is BOUNDARY
        else:
            assert kr == 3 - k

    @given(pair)
    def test_reference_itself_is_boundary(self, r):
        assert categories_from_salience(SIGMA_BGS).classify(r, r) is BOUNDARY

    @given(pos, pos, pos)
    def test_s4_pointwise(self, a, y, z):
        if abs(y - z) <= 1e-6:
            return
        assert categories_from_salience(SIGMA_BGS).classify((a, y), (a, z)) == 2

    def test_non_monotone_contrast_rejected(self):
        with pytest.raises(ConstructionError):
            categories_from_salience(get_salience("a * b"))


class TestSProperties:
    budget = SampleBudget(7000, seed=0)

    def test_s3_equal_percentage_witness(self):
        catfn = categories_from_salience(S3)
        rep = check_S_properties(catfn, self.budget)
        assert rep.failed() == ["S6"]
        w = rep.verdicts["S6"].witness
        assert (w["x"], w["r"]) == ((2.0, 2.0), (4.0, 1.0))
        assert replay_s_witness(catfn, "S6", w)

    def test_s2_diminishing_sensitivity_witness(self):
        catfn = categories_from_salience(S2)
        w = check_S_properties(catfn, self.budget).verdicts["S5"].witness
        assert w["x"] == pytest.approx((2, math.sqrt(5)))
        assert w["r"] == pytest.approx((1, math.sqrt(2)))
        assert replay_s_witness(catfn, "S5", w)

    def test_ratio_all_pass(self):
        assert check_S_properties(categories_from_salience(S4), self.budget).passed

    def test_every_failure_replays(self):
        for sigma in (S1, S2, S3):
            catfn = categories_from_salience(sigma)
            rep = check_S_properties(catfn, self.budget)
            for prop in rep.failed():
                assert replay_s_witness(catfn, prop, rep.verdicts[prop].witness), (sigma, prop)

    def test_needs_two_categories(self):
        with pytest.raises(ArityError):
            check_S_properties(GainLoss(), self.budget)


class TestHodEquivalence:
    def test_identity(self):
        assert hod_category_equivalence(SIGMA_BGS, SIGMA_BGS, SampleBudget(2000)).passed

    def test_bgs_vs_ratio_hand_points(self):
        # sigma_bgs(a, b) > sigma_bgs(c, d) iff max(a/b, b/a) > max(c/d, d/c)
        pts = [(a, b, c, d) for a in (0.5, 1, 3) for b in (0.7, 2) for c in (1, 4) for d in (0.3, 5)]
        for a, b, c, d in pts:
            lhs = SIGMA_BGS.fn(a, b) > SIGMA_BGS.fn(c, d)
            rhs = max(a / b, b / a) > max(c / d, d / c)
            assert lhs == rhs

    def test_non_hod_precondition(self):
        with pytest.raises(PreconditionError):
            hod_category_equivalence(SIGMA_BGS, S3, SampleBudget(100))

    def test_forced_comparison_finds_disagreement(self):
        v = hod_category_equivalence(SIGMA_BGS, S3, SampleBudget(20_000), force=True)
        assert v.failed
        w = v.witness
        assert (w["gap1"] > 0) != (w["gap2"] > 0)
