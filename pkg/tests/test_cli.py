import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from riskgrid.axioms import AuditConfig, RiskFunctional, check_coherence, check_comonotone_additivity
from riskgrid.cli import (
    EXIT_MALFORMED,
    EXIT_OK,
    EXIT_PRECONDITION,
    EXIT_VIOLATION,
    counterexample_from_json,
    render_decimal,
    render_report,
    run,
)
from riskgrid.kusuoka import KusuokaMeasure

import doubles


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def call(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    text = out.getvalue()
    return code, (json.loads(text) if text else None), err.getvalue()


@pytest.fixture
def x_file(tmp_path):
    return write(tmp_path, "x.json", {"outcomes": ["0", "1", "0.8", "3"]})


@pytest.fixture
def pair_file(tmp_path):
    return write(tmp_path, "pair.json", {"outcomes": ["2", "2", "3", "3"], "outcomes_y": ["1", "2", "3", "4"]})


def test_avar_example(x_file):
    assert call("avar", "--alpha", "1/2", "--in", x_file)[:2] == (EXIT_OK, {"value": "2"})
    assert call("avar", "--alpha", "grid:2", "--in", x_file)[1] == {"value": "2"}
    assert call("avar", "--alpha", "3/8", "--in", x_file)[1] == {"value": "44/25"}


@pytest.mark.parametrize("route", ["closed", "integral", "ru", "dual"])
def test_avar_routes_agree(x_file, route):
    code, out, _ = call("avar", "--alpha", "0.375", "--route", route, "--in", x_file)
    assert code == EXIT_OK and out["value"] == "44/25"


def test_avar_route_outputs(x_file):
    assert call("avar", "--alpha", "1/2", "--route", "ru", "--in", x_file)[1] == {"value": "2", "minimizers": ["4/5", "1"]}
    assert call("avar", "--alpha", "0", "--route", "ru", "--in", x_file)[1]["minimizers"] == [None, "0"]
    out = call("avar", "--alpha", "1/2", "--route", "dual", "--in", x_file)[1]
    assert out == {"value": "2", "density": ["0", "1/2", "0", "1/2"]}
    assert call("avar", "--alpha", "1", "--route", "dual", "--in", x_file)[0] == EXIT_PRECONDITION


def test_var_grid_decimal(x_file):
    assert call("var", "--p", "1/2", "--in", x_file)[1] == {"value": "4/5"}
    assert call("grid", "--in", x_file)[1] == {"grid": ["6/5", "8/5", "2", "3", "3"]}
    out = call("avar", "--alpha", "1/3", "--in", x_file, "--format", "decimal", "--digits", "4")[1]
    assert out == {"value": "1.7000"}


def test_csv_input(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("0\n1\n0.8\n3\n", encoding="utf-8")
    assert call("grid", "--csv", str(path))[1] == {"grid": ["6/5", "8/5", "2", "3", "3"]}


def test_eval(tmp_path):
    f = write(tmp_path, "m.json", {"outcomes": ["0", "1", "0.8", "3"], "kusuoka": ["1/2", "0", "0", "0", "1/2"]})
    assert call("eval", "--in", f)[1] == {"value": "21/10"}
    f = write(tmp_path, "f.json", {"outcomes": ["0", "1", "0.8", "3"], "family": [["1", "0", "0", "0", "0"], ["0", "0", "0", "1", "0"]]})
    assert call("eval", "--in", f)[1] == {"value": "3", "argmax": 1}
    f = write(tmp_path, "s.json", {"outcomes": ["0", "1", "0.8", "3"], "spectral": ["0", "0", "1/2", "1/2"]})
    assert call("eval", "--in", f)[1] == {"value": "2"}


def test_convert(tmp_path):
    f = write(tmp_path, "w.json", {"spectral": ["1/4", "1/4", "1/4", "1/4"]})
    assert call("convert", "--direction", "spectral-to-kusuoka", "--in", f)[1] == {"kusuoka": ["1", "0", "0", "0", "0"]}
    f = write(tmp_path, "k.json", {"kusuoka": ["0", "0", "0", "1/2", "1/2"]})
    assert call("convert", "--direction", "kusuoka-to-spectral", "--in", f)[1] == {"spectral": ["0", "0", "0", "1"]}


def test_ssd(pair_file, tmp_path):
    assert call("ssd", "--in", pair_file)[1] == {"relation": "LeftDominated", "methods_agree": True}
    f = write(tmp_path, "p.json", {"outcomes": ["1", "2", "3", "4"], "outcomes_y": ["2", "2", "3", "3"]})
    assert call("ssd", "--in", f)[1] == {"relation": "RightDominated", "methods_agree": True}
    out = call("ssd", "--in", f, "--witnesses")[1]
    assert out["witnesses"]["WeakMajorization"] == {"x_fails": 1, "y_fails": None}


def test_comonotone(tmp_path):
    f = write(tmp_path, "c.json", {"outcomes": ["0", "1", "0.8", "3"], "outcomes_y": ["0", "1", "-1", "0.5"]})
    assert call("comonotone", "--in", f)[1] == {"comonotone": False, "witness": [0, 2]}


def test_birkhoff(tmp_path):
    f = write(tmp_path, "m.json", {"matrix": [["1/2", "1/2"], ["1/2", "1/2"]]})
    out = call("birkhoff", "--in", f)[1]
    assert sorted((t["weight"], t["permutation"]) for t in out["terms"]) == [("1/2", [0, 1]), ("1/2", [1, 0])]
    f = write(tmp_path, "bad.json", {"matrix": [["1", "0"], ["1", "0"]]})
    assert call("birkhoff", "--in", f)[0] == EXIT_PRECONDITION


def test_hlp(pair_file, tmp_path):
    code, out, _ = call("hlp", "--in", pair_file)
    assert code == EXIT_OK and len(out["matrix"]) == 4
    f = write(tmp_path, "p.json", {"outcomes": ["1", "2", "3", "4"], "outcomes_y": ["2", "2", "3", "3"]})
    code, out, err = call("hlp", "--in", f)
    assert code == EXIT_PRECONDITION and out is None and "not dominated" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["avar", "--alpha", "1/2"],
        ["avar", "--alpha", "3/2", "--in", "X"],
        ["avar", "--alpha", "abc", "--in", "X"],
        ["frobnicate"],
        ["eval", "--in", "X"],
    ],
)
def test_malformed_input(argv, x_file):
    argv = [x_file if a == "X" else a for a in argv]
    assert call(*argv)[0] == EXIT_MALFORMED


def test_malformed_documents(tmp_path):
    for doc in ({"outcomes": [0.8, 1]}, {"outcomes": []}, {"outcomes": ["1e3"]}, ["not", "an", "object"]):
        f = write(tmp_path, "bad.json", doc)
        assert call("grid", "--in", f)[0] == EXIT_MALFORMED
    f = write(tmp_path, "dim.json", {"outcomes": ["1", "2"], "spectral": ["1/3", "1/3", "1/3"]})
    assert call("eval", "--in", f)[0] == EXIT_MALFORMED
    f = write(tmp_path, "w.json", {"spectral": ["1/2", "1/4", "1/4"]})
    assert call("convert", "--direction", "spectral-to-kusuoka", "--in", f)[0] == EXIT_MALFORMED
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    assert call("grid", "--in", str(tmp_path / "broken.json"))[0] == EXIT_MALFORMED


def test_audit_pass_and_violation(tmp_path):
    code, out, _ = call("audit", "--kind", "avar", "--n", "4", "--alpha", "1/2", "--trials", "50", "--seed", "1")
    assert code == EXIT_OK
    assert out["checks"]["monotonicity"] == {"status": "pass", "trials": 50}
    f = write(tmp_path, "fam.json", {"family": [["0", "1", "0", "0", "0"], ["1/2", "0", "0", "1/2", "0"]]})
    code, out, _ = call("audit", "--kind", "family", "--in", f, "--trials", "50", "--checks", "comonotone")
    assert code == EXIT_VIOLATION
    assert out["comonotone"] == {"behavioral": "fail", "by_form": "NotComonotoneByForm"}
    assert call("audit", "--kind", "avar", "--n", "4")[0] == EXIT_MALFORMED
    assert call("audit", "--kind", "max", "--n", "4", "--checks", "bogus")[0] == EXIT_MALFORMED


def test_audit_dual_verdict(tmp_path):
    f = write(tmp_path, "k.json", {"kusuoka": ["0", "0", "0", "0", "1"]})
    code, out, _ = call("audit", "--kind", "kusuoka", "--in", f, "--trials", "100", "--checks", "comonotone")
    assert code == EXIT_OK
    assert out["comonotone"] == {"behavioral": "pass", "by_form": "NotComonotoneByForm"}


def test_seed_from_environment(monkeypatch):
    argv = ["audit", "--kind", "mean", "--n", "3", "--trials", "5"]
    monkeypatch.setenv("RISKGRID_SEED", "99")
    from riskgrid import cli
    assert cli.build_parser().parse_args(argv).seed == 99
    monkeypatch.delenv("RISKGRID_SEED")
    assert cli.build_parser().parse_args(argv).seed == 0


def test_render_decimal_half_even():
    assert render_decimal(Fraction(5, 2), 0) == "2"
    assert render_decimal(Fraction(7, 2), 0) == "4"
    assert render_decimal(Fraction(-1, 8), 2) == "-0.12"
    assert render_decimal(Fraction(1, 3), 3) == "0.333"
    assert render_decimal(Fraction(-44, 25), 1) == "-1.8"
    assert render_decimal(Fraction(1, 200), 2) == "0.00"


def test_render_report_round_trip():
    rho = doubles.negated_max(4)
    report = check_coherence(rho, AuditConfig(trials=200, seed=5, n=4))
    text = render_report(report)
    assert text == render_report(report)
    doc = json.loads(text)
    assert doc["checks"]["positive_homogeneity"] == {"status": "pass", "trials": 200}
    entry = doc["checks"]["monotonicity"]
    assert entry["status"] == "fail"
    cx = counterexample_from_json(entry["counterexample"])
    assert cx == report["monotonicity"].counterexample
    assert cx.replay(rho)
    assert set(entry["counterexample"]["inputs"]) == {"Y1", "Y2"}


def test_render_report_dual_verdict():
    rf = RiskFunctional.kusuoka(KusuokaMeasure.point_mass(4, 4))
    doc = json.loads(render_report(check_comonotone_additivity(rf, AuditConfig(trials=50, seed=1, n=4))))
    assert doc["comonotone"] == {"behavioral": "pass", "by_form": "NotComonotoneByForm"}


def test_subprocess_is_byte_identical(x_file):
    cmd = [sys.executable, "-m", "riskgrid", "avar", "--alpha", "1/2", "--in", x_file]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b == b'{"value": "2"}\n'
