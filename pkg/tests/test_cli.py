import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import given

from conftest import hyperbolic_series
from dglue.cli import main
from dglue.errors import ParseError, ValidationError
from dglue.manifest import (
    canonical, dumps, from_dict, loads_doc, parse_class_expr, parse_glue_expr, to_dict,
)

DATA = Path(str(resources.files("dglue").joinpath("data")))
K3 = str(DATA / "k3_blowup2.json")
K3T = str(DATA / "k3_blowup2_twisted.json")
TH = str(DATA / "k3_torus_handle.json")


def _doc():
    return json.loads(Path(K3).read_text())


def _write(tmp_path, doc, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_eval_structure_series(capsys):
    assert main(["eval", "--manifold", K3, "--class", "s*sigma"]) == 0
    assert capsys.readouterr().out.strip() == "(1/4)*exp(2*s) - (1/4)*exp(-2*s)"


def test_eval_combined_json(capsys):
    assert main(["eval", "--manifold", K3, "--class", "s*sigma", "--combined", "--json"]) == 0
    out = capsys.readouterr().out
    block = json.loads(out[out.index("{"):])
    assert block["value"] == "(1/4)*exp(2*s) - (1/4)*exp(-2*s)"


def test_eval_empty_series(tmp_path, capsys):
    doc = _doc()
    doc["basic_classes"] = []
    assert main(["eval", "--manifold", _write(tmp_path, doc), "--class", "s*sigma"]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_eval_bad_vector_length(tmp_path, capsys):
    doc = _doc()
    doc["classes"]["w"] = [0, 1]
    assert main(["eval", "--manifold", _write(tmp_path, doc), "--class", "s*sigma"]) == 3
    assert "vector length" in capsys.readouterr().err


def test_parse_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["eval", "--manifold", str(bad), "--class", "s*sigma"]) == 2
    assert main(["eval", "--manifold", K3, "--class", "s*"]) == 2
    doc = _doc()
    doc["basic_classes"][0]["coeff"] = "a quarter"
    assert main(["eval", "--manifold", _write(tmp_path, doc), "--class", "s*sigma"]) == 2
    doc = _doc()
    doc["basic_classes"][0]["coeff"] = 0.25
    assert main(["eval", "--manifold", _write(tmp_path, doc), "--class", "s*sigma"]) == 2


def test_glue_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["glue", "--m1", K3, "--m2", K3, "--probe", "t*D + s*Sigma", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    nonzero = sorted(r["sum"] for r in rep["rules"] if r["sum"] != "0")
    assert nonzero == ["-2", "2"]
    assert sorted(k["coeff"] for k in rep["kappas"]) == ["-2", "2"]
    assert rep["topology"]["euler"] == 56
    assert rep["probe"]["value"] == "2*exp(s*t + 2*s + 2*t) - 2*exp(s*t - 2*s - 2*t)"


def test_glue_all_rules_zero(tmp_path):
    out = tmp_path / "r.json"
    assert main(["glue", "--m1", K3, "--m2", TH, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert all(r["sum"] == "0" for r in rep["rules"])


def test_glue_genus_3_exit_3(tmp_path):
    doc = _doc()
    doc["genus"] = 3
    p = _write(tmp_path, doc)
    assert main(["glue", "--m1", p, "--m2", p]) == 3


def test_glue_probe_out_of_domain_exit_4():
    assert main(["glue", "--m1", K3, "--m2", K3, "--probe", "u*m1.w"]) == 4


def test_verify_default_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_verify_section(capsys):
    assert main(["verify", "--section", "ring"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert lines and all("[ring]" in l for l in lines)


@pytest.mark.parametrize("mu_x", ["2,0,-4,0", "2,0,-1/4,0"])
def test_verify_wrong_point_class(mu_x, capsys):
    assert main(["verify", "--mu-x", mu_x]) == 1
    out = capsys.readouterr().out
    assert "FAIL [cap] point-class insertion" in out


def test_predict(capsys):
    assert main(["predict", "--genus", "3"]) == 0
    assert "4096 (conjecture)" in capsys.readouterr().out
    assert main(["predict", "--genus", "1"]) == 4


def test_validate_and_fmt(capsys):
    assert main(["validate", "--manifold", K3]) == 0
    assert "d0 = -5" in capsys.readouterr().out
    assert main(["fmt", K3]) == 0
    assert capsys.readouterr().out == Path(K3).read_text()


def test_verbose_env(monkeypatch, capsys):
    monkeypatch.setenv("DGLUE_VERBOSE", "1")
    assert main(["eval", "--manifold", K3, "--class", "s*sigma"]) == 0
    assert "alpha" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dglue", "predict", "--genus", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "32 (theorem)" in proc.stdout


# -- file format and expressions ------------------------------------------------

@pytest.mark.parametrize("path", [K3, K3T, TH])
def test_canonical_idempotent(path):
    text = Path(path).read_text()
    once = canonical(text)
    assert canonical(once) == once
    assert once == text


@given(hyperbolic_series())
def test_roundtrip_random(series):
    m = series.owner
    text = dumps(to_dict(m, series))
    m2, s2 = from_dict(loads_doc(text))
    assert s2.classes == series.classes
    assert (m2.sigma, m2.w, m2.dbar, m2.lattice) == (m.sigma, m.w, m.dbar, m.lattice)
    assert dumps(to_dict(m2, s2)) == text


def test_missing_keys():
    with pytest.raises(ParseError):
        from_dict({"name": "x"})


def test_validation_error_lists_everything():
    doc = _doc()
    doc["classes"]["sigma"] = [1, 0, 0, 0]
    doc["b_plus"] = 2
    with pytest.raises(ValidationError) as info:
        from_dict(doc)
    text = " ".join(info.value.violations)
    assert "sigma self-intersection" in text and "suitable" in text


def test_class_expressions(k3):
    m, _ = k3
    assert parse_class_expr("s*sigma + t*dbar", m) == {"s": m.sigma, "t": m.dbar}
    assert parse_class_expr("2*u*(E1 - E2)", m) == {"u": (0, 0, 2, -2)}
    assert parse_class_expr("s*sigma - s*S", m) == {"s": (0, 0, -1, -1)}
    for bad in ("sigma", "s*t*sigma", "s + sigma", "exp*sigma", "s*nope.x", "s*sigma**2"):
        with pytest.raises(ParseError):
            parse_class_expr(bad, m)


def test_glue_expressions(k3):
    m, _ = k3
    p = parse_glue_expr("u*m1.P + v*m2.E1 + t*D + s*Sigma", m, m)
    assert p == {"alpha": {"u": (0, 0, 1, -1)}, "beta": {"v": (0, 0, 1, 0)}, "t": "t", "s": "s"}
    with pytest.raises(ParseError):
        parse_glue_expr("u*m3.P", m, m)
    with pytest.raises(ParseError):
        parse_glue_expr("2*t*D", m, m)
