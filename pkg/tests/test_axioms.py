"""Axiom checkers, witnesses, and the comparison table."""

from __future__ import annotations

import pytest

from ctm.axioms import (AXIOMS, CTM_BUNDLE, StepModel, check_axiom, check_sdo,
                        convex_counterexample, interlock_counterexample,
                        model_comparison_table, replay_witness)
from ctm.core import Box, SingleCategory
from ctm.errors import ArityError, PreconditionError
from ctm.models import LINEAR, CtmModel, bgs, bgs_wine, cbgs, mo, neoclassical, pt, tk
from ctm.sampling import SampleBudget

BUDGET = SampleBudget(4000, seed=0)


def _check(model, axiom, budget=BUDGET):
    rep = check_axiom(model, axiom, budget)
    if rep.witness is not None:
        assert rep.replay(model), f"{axiom} witness does not replay for {model.name}"
    return rep


class TestCtmBundle:
    @pytest.mark.parametrize("model", [neoclassical(), bgs(0.6), tk(), mo(), pt()],
                             ids=lambda m: m.name)
    @pytest.mark.parametrize("axiom", CTM_BUNDLE + ("RefInterlock", "AAC"))
    def test_builtin_ctm_models_pass(self, model, axiom):
        rep = _check(model, axiom)
        assert rep.passed, rep.witness
        assert rep.n_checked > 0

    def test_cbgs_fails_wri_with_a_cycle(self):
        rep = _check(cbgs("salience"), "WRI")
        assert rep.verdict.failed
        assert rep.replay(cbgs("salience"))

    def test_step_model_fails_continuity(self):
        rep = _check(StepModel(), "CatCont")
        assert rep.verdict.failed

    def test_interlock_counterexample(self):
        model = interlock_counterexample()
        assert _check(model, "RefInterlock").verdict.failed
        assert _check(model, "CatCancel").passed

    def test_convex_counterexample(self):
        model = convex_counterexample()
        assert _check(model, "AAC").verdict.failed
        assert _check(model, "CatCancel").passed

    def test_non_ctm_models_are_a_precondition_error(self):
        for axiom in ("RefInterlock", "AAC"):
            with pytest.raises(PreconditionError):
                check_axiom(cbgs(), axiom, BUDGET)


class TestFullAxioms:
    def test_full_cancellation(self):
        assert _check(tk(), "FullCancel").passed
        assert _check(mo(), "FullCancel").verdict.failed
        assert _check(bgs_wine(), "FullCancel").verdict.failed

    def test_single_category_cancellation(self):
        model = CtmModel("single", SingleCategory(domain_box=Box.square(0.5, 5.0)),
                         [(LINEAR, LINEAR)])
        assert _check(model, "FullCancel").passed

    def test_full_monotonicity(self):
        assert _check(bgs(0.6), "FullMono").verdict.failed
        assert _check(tk(), "FullMono").passed
        assert _check(neoclassical(), "FullMono").passed

    def test_reference_irrelevance(self):
        assert _check(tk(), "RefIrrel").verdict.failed
        assert _check(bgs(0.6), "RefIrrel").passed


class TestSdo:
    def test_bgs_low_weight_fails(self):
        assert _check(bgs(0.4), "SDO").verdict.failed

    def test_bgs_default_passes(self):
        assert _check(bgs(0.6), "SDO").passed

    def test_single_category_is_vacuous(self):
        rep = check_sdo(neoclassical(), BUDGET)
        assert rep.passed and rep.n_checked == 0

    def test_four_categories_rejected(self):
        with pytest.raises(ArityError):
            check_sdo(tk(), BUDGET)


class TestReports:
    def test_unknown_axiom(self):
        with pytest.raises(ValueError):
            check_axiom(tk(), "Nope", BUDGET)
        with pytest.raises(ValueError):
            replay_witness(tk(), "Nope", {})

    def test_replay_rejects_a_passing_model(self):
        rep = _check(tk(), "RefIrrel")
        assert not rep.replay(bgs(0.6, box=tk().box))

    @pytest.mark.parametrize("model, axiom", [(mo(), "FullCancel"), (cbgs(), "WRI"),
                                              (StepModel(), "CatCont")],
                             ids=["mo-cancel", "cbgs-wri", "step-cont"])
    def test_failure_survives_larger_budgets(self, model, axiom):
        small = check_axiom(model, axiom, SampleBudget(2000, seed=3))
        large = check_axiom(model, axiom, SampleBudget(8000, seed=3))
        assert small.verdict.failed and large.verdict.failed
        assert small.witness == large.witness

    def test_to_dict(self):
        d = _check(tk(), "RefIrrel").to_dict()
        assert d["axiom"] == "RefIrrel" and d["model"] == "tk"
        assert d["budget"]["n_samples"] == 4000

    def test_every_axiom_named(self):
        assert len(AXIOMS) == 10 and set(CTM_BUNDLE) <= set(AXIOMS)


class TestComparisonTable:
    def test_cbgs_column_fails_ctm_row(self):
        table = model_comparison_table([tk(), cbgs()], BUDGET)
        assert table.holds("CTM", "tk")
        assert not table.holds("CTM", "cbgs")
        assert table.mark("CTM", "cbgs") == "✗"

    def test_render_and_dict(self):
        table = model_comparison_table([neoclassical(), tk()], BUDGET)
        text = table.render()
        assert text.splitlines()[0].split("|")[1:] == [" neoclassical ", " tk"]
        assert "Reference Irrelevance" in text
        d = table.to_dict()
        assert [row["row"] for row in d["rows"]] == list(table.rows)

    def test_duplicate_names_are_suffixed(self):
        table = model_comparison_table([tk(), tk()], BUDGET)
        assert table.models == ("tk", "tk#1")
