"""Model construction from preset names and JSON configs."""

from __future__ import annotations

import json

import pytest

from ctm.errors import ConstructionError
from ctm.models import CtmModel
from ctm.presets import PRESETS, build_model, load_config, load_model


class TestBuildModel:
    @pytest.mark.parametrize("name", PRESETS)
    def test_every_preset_builds(self, name):
        model = build_model(name)
        x = model.box.point(0.3, 0.6)
        r = model.ref_box.point(0.5, 0.5)
        k, u = model.evaluate(x, r)
        assert model.catfn.m >= 1

    def test_parameters_reach_the_model(self):
        model = build_model({"model": "tk", "lam1": 3.0, "lam2": 1.5})
        assert model.value((9, 11), (10, 10)).utility == pytest.approx(3.0 * -1 + 1)
        model = build_model({"model": "bgs", "w": 0.7, "box": [0.5, 0.5, 5, 5]})
        assert model.value((3, 2), (2, 2)).utility == pytest.approx(0.7 * 3 + 0.3 * 2)

    def test_mo_frontier_expression(self):
        model = build_model({"model": "mo", "c": 2.0, "frontier": "x1 + x2"})
        lo, hi = model.value((1.0, 1.0), (2.0, 2.0)), model.value((3.0, 3.0), (2.0, 2.0))
        assert hi.utility - lo.utility == pytest.approx(4.0 + 2.0)

    def test_wine_preset_is_signed(self):
        model = build_model("bgs-wine")
        assert isinstance(model, CtmModel)
        assert model.value((-8, 8), (-9, 6)).category == 2

    @pytest.mark.parametrize("cfg", [
        {"model": "nope"},
        {"model": "tk", "gamma": 1.0},
        {"model": "bgs", "box": [1, 2, 3]},
        {"model": "mo", "frontier": "import os"},
        {"model": "bgs", "w": 2.0},
        {"model": "neoclassical", "u": "wobbly"},
    ], ids=["unknown-model", "unknown-key", "short-box", "bad-expression", "bad-weight",
            "bad-utility"])
    def test_rejected(self, cfg):
        with pytest.raises(ConstructionError):
            build_model(cfg)


class TestLoadConfig:
    def test_preset_name(self):
        assert load_config("tk") == {"model": "tk"}

    def test_file(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"model": "tk", "lambda": 2.5}))
        assert load_model(str(path)).value((9, 11), (10, 10)).utility == pytest.approx(-1.5)

    def test_missing_or_invalid(self, tmp_path):
        with pytest.raises(ConstructionError):
            load_config(str(tmp_path / "missing.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConstructionError):
            load_config(str(bad))
        arr = tmp_path / "arr.json"
        arr.write_text("[1, 2]")
        with pytest.raises(ConstructionError):
            load_config(str(arr))
