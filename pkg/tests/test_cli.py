import csv
import io
import json
from fractions import Fraction

import pytest

from glnlocal.cli import Config, UsageError, dumps, encode, load_config, main, run_suite


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_config_defaults():
    cfg = load_config(environ={})
    assert cfg == Config()
    assert cfg.lambda_bound == 40 and cfg.quadrature_nodes == 64


def test_config_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("default_p = 3\nlambda_bound = 25\nthreads = 2\n")
    cfg = load_config(str(path), environ={})
    assert (cfg.default_p, cfg.lambda_bound, cfg.threads) == (3, 25, 2)
    cfg = load_config(str(path), {"default_p": 5, "lambda_bound": None}, environ={})
    assert cfg.default_p == 5 and cfg.lambda_bound == 25
    cfg = load_config(str(path), {"threads": 3}, environ={"GLNLOCAL_THREADS": "4"})
    assert cfg.threads == 4


def test_config_section_header_optional(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("[glnlocal]\nseed = 7\n")
    assert load_config(str(path), environ={}).seed == 7


@pytest.mark.parametrize("text", ["bogus_key = 1\n", "default_p = 4\n", "lambda_bound = 2.5\n", "tolerance = -1\n"])
def test_config_rejects_bad_values(tmp_path, text):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(UsageError):
        load_config(str(path), environ={})


def test_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("default_p = 4\n")
    code, _, err = _run(capsys, "suite", "symfun", "--config", str(path))
    assert code == 2 and "prime" in err


def test_unknown_suite_exit_code(capsys):
    code, _, err = _run(capsys, "suite", "bogus")
    assert code == 2 and "invalid choice" in err
    with pytest.raises(UsageError):
        run_suite("bogus")


def test_encode_exact_and_complex():
    assert encode(Fraction(7, 4)) == {"value": 1.75, "exact": "7/4"}
    assert encode(1 + 2j) == {"re": 1.0, "im": 2.0}
    text = dumps({"x": 0.1})
    assert "0.10000000000000001" in text
    assert json.loads(text)["x"] == 0.1


def test_coset_classify_transposition(capsys):
    code, out, _ = _run(capsys, "coset", "classify", "--matrix", "[[0,1,0],[1,0,0],[0,0,1]]")
    rec = json.loads(out)
    assert code == 0
    assert rec["w"] == [2, 1, 3]
    assert all(e["exact"] == "0/1" for e in rec["y"])


def test_coset_enumerate(capsys):
    code, out, _ = _run(capsys, "coset", "enumerate", "--n", "3", "--Q", "2")
    assert code == 0 and json.loads(out)["permutations"] == [[2, 3, 1]]


def test_period_record(capsys):
    code, out, _ = _run(capsys, "period", "--n", "3", "--p", "2", "--satake", "1,1,1", "--nu", "0,0",
                        "--lambda-bound", "40")
    rec = json.loads(out)
    assert code == 0
    assert rec["inputs"]["satake"][0] == {"re": 1, "im": 0}
    assert max(rec["discrepancies"].values()) < 1e-6


def test_zeta_record(capsys):
    code, out, _ = _run(capsys, "zeta", "--n", "3", "--p", "2", "--satake", "1,1,1", "--nu", "0,0")
    rec = json.loads(out)
    assert code == 0 and rec["abs_error"] <= 1e-7
    assert rec["reference"]["re"] == 64


def test_jacquet_bad_nu(capsys):
    code, _, err = _run(capsys, "jacquet", "--nu", "0.2,0")
    assert code == 2 and err


def test_suite_report_shape_and_determinism(capsys, tmp_path):
    args = ["suite", "coset", "--fuzz-scale", "0.05"]
    code, first, _ = _run(capsys, *args)
    assert code == 0
    code, second, _ = _run(capsys, *args)
    assert first == second
    rep = json.loads(first)
    assert rep["suite"] == "coset"
    assert len(rep["cases"]) >= 10
    assert all(c["status"] == "pass" and c["anchor"] for c in rep["cases"])
    assert all(c["runtime_ms"] is None for c in rep["cases"])


def test_suite_timings_and_csv(capsys, tmp_path):
    out_path = tmp_path / "r.csv"
    code, _, _ = _run(capsys, "suite", "symfun", "--fuzz-scale", "0.2", "--format", "csv", "--timings",
                      "--output", str(out_path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_path.read_text())))
    assert rows and {"id", "anchor", "status", "runtime_ms"} <= set(rows[0])
    assert all(r["runtime_ms"] for r in rows)


def test_oldforms_suite_small(capsys):
    code, out, _ = _run(capsys, "suite", "oldforms", "--lambda-bound", "30", "--fuzz-scale", "0.1")
    rep = json.loads(out)
    ids = {c["id"]: c["status"] for c in rep["cases"]}
    assert any(k.startswith("wj-at-identity") for k in ids)
    assert all(v == "pass" for k, v in ids.items() if k.startswith("wj-at-identity"))


def test_failure_sets_exit_code(capsys):
    # an absurd tolerance makes the numeric cases fail
    code, out, _ = _run(capsys, "suite", "whittaker", "--tolerance", "1e-300", "--fuzz-scale", "0.1")
    assert code == 1
    assert any(c["status"] == "fail" for c in json.loads(out)["cases"])
