import dataclasses
import json
from pathlib import Path

import pytest

from holgraph import cli
from holgraph import funcmodel as fm
from holgraph.reports import make_report

DEMOS = Path(__file__).resolve().parent.parent / "demos" / "configs"


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list_text_and_json(capsys):
    code, text, _ = run(["list"], capsys)
    assert code == 0
    names = [ln.split(":")[0] for ln in text.splitlines() if not ln.startswith(" ")]
    assert len(names) == 9 and set(names) == set(cli.EXPERIMENTS)
    code, js, _ = run(["list", "--json"], capsys)
    rows = json.loads(js)
    assert [r["name"] for r in rows] == names
    assert all(len(r["paper_tags"]) >= 1 for r in rows)


def test_te1_example_config(tmp_path, capsys):
    code, _, _ = run(["run", str(DEMOS / "te1_ex1_d2.json"), "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "te1_ex1_d2.report.json").read_text())
    assert rep["schema_version"] == 1 and rep["seed"] == 0
    tags = [r["paper_tag"] for e in rep["experiments"] for r in e["reports"]]
    assert "eq22" in tags and "e15" in tags
    csv = (tmp_path / "te1_ex1_d2.report.csv").read_text().splitlines()
    assert csv[0].split(",") == ["experiment", "name", "paper_tag", "status", "scale",
                                 "lhs_log", "rhs_log", "margin"]
    assert len(csv) > 1


def test_t_out_of_range(tmp_path, capsys):
    code, _, err = run(["run", str(DEMOS / "bad_t.json"), "--out", str(tmp_path)], capsys)
    assert code == 2
    assert "1<t≤9" in err


def test_transcendence_config(tmp_path, capsys):
    code, _, _ = run(["run", str(DEMOS / "transcendence_k10.json"), "--out", str(tmp_path),
                      "--format", "json"], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "transcendence_k10.report.json").read_text())
    mk = [r for r in rep["experiments"][0]["reports"] if r["paper_tag"] == "e136"][0]
    assert mk["params"]["mk_lower"] == 34
    assert not (tmp_path / "transcendence_k10.report.csv").exists()


@pytest.mark.parametrize("content, needle", [
    ("{not json", "valid JSON"),
    ('{"experiment": "nope"}', "unknown experiment"),
    ('{"experiment": "markov", "h": "missing.json", "R": 1, "t": 2}', "not found"),
    ('{"experiment": "markov", "h": {"type": "poly", "nvars": 1, "terms": []}, "t": 2}',
     "missing"),
    ('{"experiment": "markov", "h": {"type": "poly", "nvars": 1, "terms": []}, "R": 1, '
     '"t": 2, "bogus": 1}', "unknown parameters"),
    ('{"experiment": "markov", "h": {"type": "weird"}, "R": 1, "t": 2}', "cannot parse"),
    ('{"experiment": "markov", "h": {"type": "poly", "nvars": 1, "terms": []}, "R": -1, '
     '"t": 2}', "positive"),
])
def test_parse_errors_exit_2(tmp_path, capsys, content, needle):
    cfg = tmp_path / "c.json"
    cfg.write_text(content)
    code, _, err = run(["run", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 2
    assert needle in err


def test_falsified_exits_1(tmp_path, capsys, monkeypatch):
    def broken(fn, p, seed):
        return {"reports": [make_report("forced", "e32", 1.0, 0.0)]}

    monkeypatch.setitem(cli.EXPERIMENTS, "markov",
                        dataclasses.replace(cli.EXPERIMENTS["markov"], runner=broken))
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "markov", "h": fm.to_dict(fm.monomial([2])),
                               "R": 1.0, "t": 2.0}))
    code, out, _ = run(["run", str(cfg), "--out", str(tmp_path), "--jobs", "1"], capsys)
    assert code == 1 and "fail=1" in out


def test_hypothesis_not_met_exits_0(tmp_path, capsys):
    g = fm.poly({(0, 1, 0): 1.0, (0, 0, 1): 1.0})
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "te12", "f_list": [
        fm.to_dict(fm.monomial([2])), fm.to_dict(fm.monomial([3]))], "g": fm.to_dict(g),
        "r": 1.0, "t": 9.0}))
    code, out, _ = run(["run", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 0 and "hypothesis_not_met=2" in out


def test_seed_override_and_determinism(tmp_path, capsys):
    cfg = DEMOS / "geometry.json"
    run(["run", str(cfg), "--out", str(tmp_path / "a"), "--jobs", "1"], capsys)
    run(["run", str(cfg), "--out", str(tmp_path / "b"), "--jobs", "4"], capsys)
    run(["run", str(cfg), "--out", str(tmp_path / "c"), "--seed", "99"], capsys)
    for ext in ("json", "csv"):
        a = (tmp_path / "a" / f"geometry.report.{ext}").read_bytes()
        b = (tmp_path / "b" / f"geometry.report.{ext}").read_bytes()
        assert a == b
    c = json.loads((tmp_path / "c" / "geometry.report.json").read_text())
    assert c["seed"] == 99
