import csv
import io
import json

import pytest

from amquad import campaign
from amquad.cli import main

SMALL = "theta=0,2/3;lambda=1/2;alpha=1;m=1;q=1,2"


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def write_corpus(tmp_path, functions):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps({"schema": 1, "functions": functions}))
    return str(path)


def test_verify_demo_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "power-mean dominance" in out and out.rstrip().endswith("PASS")


def test_verify_skips_entry_with_refuted_claim(tmp_path, capsys):
    # f' = 1 - x^2 is concave and positive on [0, 1], so the (1, 1) claim on |f'| is refuted
    corpus = write_corpus(tmp_path, [
        {"name": "sq", "f": "x^2", "fprime": "2*x", "domain_b": 1, "claims": [{"alpha": 1, "m": 1, "q": 1}]},
        {"name": "bump", "f": "x - x^3/3", "fprime": "1 - x^2", "domain_b": 1,
         "claims": [{"alpha": 1, "m": 1, "q": 1}]},
    ])
    assert main(["verify", "--corpus", corpus, "--grid", SMALL]) == 0
    captured = capsys.readouterr()
    assert "bump skipped" in captured.out
    assert "refuted" in captured.err


def test_verify_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--corpus", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_verify_missing_file(tmp_path):
    assert main(["verify", "--corpus", str(tmp_path / "none.json")]) == 2


def test_verify_wrong_derivative_rejected(tmp_path, capsys):
    corpus = write_corpus(tmp_path, [{"name": "sq", "f": "x^2", "fprime": "3*x", "domain_b": 1, "claims": []}])
    assert main(["verify", "--corpus", corpus]) == 2


def test_sweep_known_rows(capsys):
    assert main(["sweep", "--grid", SMALL]) == 0
    rows = rows_of(capsys.readouterr().out)
    assert list(rows[0]) == campaign.CSV_COLUMNS
    sq = {(r["theta"], r["q"]): r for r in rows if r["name"] == "square"}
    simpson = sq[(repr(2 / 3), "1.0")]
    assert abs(float(simpson["defect"])) <= 1e-12
    trap = sq[("0.0", "1.0")]
    assert float(trap["defect"]) == pytest.approx(1 / 6, abs=1e-10)
    assert float(trap["bound_pm"]) == pytest.approx(1 / 4, abs=1e-10)
    assert trap["bound_holder"] == "" and trap["certified"] == "true"
    assert sq[("0.0", "2.0")]["bound_holder"] != ""


def test_sweep_bytes_stable_across_runs_and_jobs(tmp_path):
    outs = []
    for jobs in ("1", "1", "3"):
        path = tmp_path / f"out{len(outs)}.csv"
        assert main(["sweep", "--grid", SMALL, "--jobs", jobs, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    assert b"\r\n" in outs[0]


def test_sweep_empty_grid(capsys):
    assert main(["sweep", "--grid", "theta="]) == 2
    assert "empty sweep" in capsys.readouterr().err


@pytest.mark.parametrize("grid", ["theta=2", "m=0", "q=1/2", "colour=1", "b=5"])
def test_sweep_bad_grid(grid):
    assert main(["sweep", "--grid", grid]) == 2


def test_sweep_unwritable_out(tmp_path):
    assert main(["sweep", "--grid", SMALL, "--out", str(tmp_path / "missing" / "x.csv")]) == 2


def test_preset_simpson(capsys):
    assert main(["preset", "simpson"]) == 0
    out = capsys.readouterr().out
    assert "(5/18)^(1-1/q)" in out
    assert "square: defect=" in out


def test_preset_midpoint_q2(capsys):
    assert main(["preset", "midpoint", "--q", "2"]) == 0
    out = capsys.readouterr().out
    assert "(1/2)^(1-1/q) = 0.707106781187" in out
    assert "holder prefactor" in out


def test_preset_unknown(capsys):
    assert main(["preset", "boole"]) == 2


def test_check_convexity(capsys):
    assert main(["check-convexity", "x^2"]) == 0
    assert "not refuted" in capsys.readouterr().out
    assert main(["check-convexity", "--", "-x^2"]) == 1
    first = capsys.readouterr().out
    assert main(["check-convexity", "--", "-x^2"]) == 1
    assert capsys.readouterr().out == first and "REFUTED" in first


def test_check_convexity_seed_flag(capsys):
    assert main(["check-convexity", "x^3", "--seed", "1F"]) == 0


def test_check_convexity_bad_expression(capsys):
    assert main(["check-convexity", "x +"]) == 2
    assert main(["check-convexity", "ln(x)"]) == 2


def test_lemma(capsys):
    assert main(["lemma", "--grid", "theta=0,1/3;lambda=1/4;m=1/2"]) == 0
    captured = capsys.readouterr()
    lines = captured.out.strip().splitlines()
    assert lines[0] == "name,theta,lambda,m,defect,rhs,residual"
    assert len(lines) == 1 + 5 * 2
    assert "max residual" in captured.err


def test_unknown_corpus_key_rejected(tmp_path, capsys):
    corpus = write_corpus(tmp_path, [{"name": "sq", "f": "x^2", "fprime": "2*x", "domain_b": 1, "claimed": []}])
    assert main(["verify", "--corpus", corpus]) == 2
    assert "unknown keys" in capsys.readouterr().err
