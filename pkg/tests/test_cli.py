"""The ``ctm`` command line, run in-process."""

from __future__ import annotations

import csv
import json

import pytest

from ctm.cli import EXIT_ERROR, EXIT_FAIL, EXIT_OK, main


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv("CTM_SEED", raising=False)


def run(tmp_path, name, *args):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


class TestCheck:
    def test_pass(self, tmp_path):
        code, out = run(tmp_path, "c.json", "check", "--model", "tk", "--axiom", "wri,catmono",
                        "--budget", "500")
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["status"] == "PASS" and doc["command"] == "check"
        assert [r["axiom"] for r in doc["reports"]] == ["WRI", "CatMono"]

    def test_fail_with_replayable_witness(self, tmp_path):
        code, out = run(tmp_path, "c.json", "check", "--model", "tk", "--axiom", "RefIrrel",
                        "--budget", "500")
        assert code == EXIT_FAIL
        (rep,) = json.loads(out.read_text())["reports"]
        assert rep["verdict"]["status"] == "FAIL"
        assert rep["replay"]["reproduces"] is True

    def test_not_tested(self, tmp_path):
        code, out = run(tmp_path, "c.json", "check", "--model", "tk", "--axiom", "SDO",
                        "--budget", "100")
        assert code == EXIT_OK
        (rep,) = json.loads(out.read_text())["reports"]
        assert rep["verdict"]["status"] == "NOT_TESTED" and rep["reason"]

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "cbgs.json"
        cfg.write_text(json.dumps({"model": "cbgs"}))
        code, out = run(tmp_path, "c.json", "check", "--model", str(cfg), "--axiom", "WRI",
                        "--budget", "4000")
        assert code == EXIT_FAIL
        assert json.loads(out.read_text())["config"] == {"model": "cbgs"}

    def test_rerun_is_byte_identical(self, tmp_path):
        args = ("check", "--model", "mo", "--axiom", "FullCancel,CatCancel", "--budget", "300")
        _, a = run(tmp_path, "a.json", *args)
        _, b = run(tmp_path, "b.json", *args)
        assert a.read_bytes() == b.read_bytes()

    def test_seed_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CTM_SEED", "17")
        _, out = run(tmp_path, "c.json", "check", "--model", "tk", "--axiom", "WRI",
                     "--budget", "100", "--seed", "3")
        assert json.loads(out.read_text())["seed"] == 17

    def test_errors(self, tmp_path, capsys):
        assert main(["check", "--model", "nope", "--axiom", "WRI"]) == EXIT_ERROR
        assert "ctm: error" in capsys.readouterr().err
        with pytest.raises(SystemExit) as exc:
            main(["check", "--model", "tk", "--axiom", "Bogus"])
        assert exc.value.code == EXIT_ERROR
        with pytest.raises(SystemExit) as exc:
            main(["check", "--model", "tk", "--budget", "0"])
        assert exc.value.code == EXIT_ERROR


class TestTable:
    def test_small_table(self, tmp_path):
        code, out = run(tmp_path, "t.json", "table", "--models", "neoclassical,tk",
                        "--budget", "500")
        assert code == EXIT_OK
        m = json.loads(out.read_text())["matrix"]
        assert m["models"] == ["neoclassical", "tk"]
        ri = m["rows"].index("Reference Irrelevance")
        assert m["holds"][ri] == [True, False]


class TestIdentify:
    @pytest.mark.parametrize("method", ["local", "bgs"])
    def test_region_map(self, tmp_path, method):
        code, out = run(tmp_path, "i.json", "identify", "--model", "bgs", "--method", method,
                        "--reference", "2,2", "--grid", "6x5")
        assert code == EXIT_OK
        rmap = json.loads(out.read_text())["region_map"]
        assert rmap["shape"] == [5, 6] and len(rmap["labels"]) == 30
        assert set(rmap["labels"]) <= {-1, 0, 1, 2}

    def test_discontinuity(self, tmp_path):
        code, out = run(tmp_path, "i.json", "identify", "--model", "mo", "--method",
                        "discontinuity", "--reference", "2,2", "--origin", "1,1",
                        "--grid", "10x10", "--rays", "64")
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        # only rays in the first quadrant reach the frontier inside the box
        assert len(doc["frontier"]) >= 16
        assert all(abs(x1 / 2 + x2 - 3) <= doc["step"] for x1, x2 in doc["frontier"])
        assert {1, 2} <= set(doc["region_map"]["labels"]) <= {0, 1, 2}

    def test_identify_choice(self, tmp_path):
        code, out = run(tmp_path, "i.json", "identify-choice", "--model", "bgs",
                        "--reference", "2,2", "--grid", "5x5")
        assert code == EXIT_OK
        assert json.loads(out.read_text())["region_map"]["method"] == "choice"


class TestSimulateAndSarp:
    def test_round_trip(self, tmp_path):
        code, data = run(tmp_path, "d.json", "simulate", "--model", "bgs", "--n", "200",
                         "--box", "1,1,10,10")
        assert code == EXIT_OK
        doc = json.loads(data.read_text())
        assert doc["version"] == 1 and len(doc["observations"]) == 200
        assert doc["metadata"]["tool"] == "ctm"
        code, rep = run(tmp_path, "s.json", "sarp", "--in", str(data))
        assert code == EXIT_OK and json.loads(rep.read_text())["status"] == "PASS"

    def test_corrupted(self, tmp_path):
        _, data = run(tmp_path, "d.json", "simulate", "--model", "bgs", "--n", "300",
                      "--box", "1,1,10,10", "--corrupt", "0.1")
        code, rep = run(tmp_path, "s.json", "sarp", "--in", str(data), "--limit", "5")
        assert code == EXIT_FAIL
        violations = json.loads(rep.read_text())["violations"]
        assert len(violations) == 5 and all(v["reproduces"] for v in violations)

    def test_not_a_dataset(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        assert main(["sarp", "--in", str(bad)]) == EXIT_ERROR


class TestCurves:
    def test_csv(self, tmp_path):
        args = ("curves", "--model", "bgs", "--reference", "2,2", "--levels", "3")
        code, a = run(tmp_path, "a.csv", *args)
        assert code == EXIT_OK
        rows = list(csv.reader(a.read_text().splitlines()))
        assert rows[0] == ["segment_id", "category", "x1", "x2"]
        assert {r[1] for r in rows[1:]} == {"1", "2"}
        _, b = run(tmp_path, "b.csv", *args)
        assert a.read_bytes() == b.read_bytes()

    def test_non_categorical_model(self, tmp_path):
        assert main(["curves", "--model", "cbgs", "--reference", "2,2", "--levels", "3"]) \
            == EXIT_ERROR


class TestSalience:
    def test_bgs_passes(self, tmp_path):
        code, out = run(tmp_path, "s.json", "salience", "--salience", "bgs", "--budget", "2000")
        assert code == EXIT_OK
        assert json.loads(out.read_text())["status"] == "PASS"

    def test_expression_fails(self, tmp_path):
        code, out = run(tmp_path, "s.json", "salience", "--salience", "abs(a - b)",
                        "--budget", "2000")
        assert code == EXIT_FAIL
