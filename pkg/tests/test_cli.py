import io
import json
from contextlib import redirect_stderr, redirect_stdout

import pytest

from pseid.cli import main
from pseid.dsl import bundled_specs


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


SPECS = bundled_specs()


def test_compare_clean_spec_agrees_with_oracle():
    code, out, _ = run("compare", SPECS["fig3"], "--semantic", "classical", "--approach", "node",
                       "--labels", "1,0,1", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    (r,) = payload["results"]
    assert r["deviation"] <= 1e-12
    assert r["ledger"]["ok"]
    assert payload["schema_version"] == 1


def test_compare_flags_the_recanting_confounder():
    code, out, _ = run("compare", SPECS["fig3_uv"], "--semantic", "classical", "--approach", "node",
                       "--format", "json")
    assert code == 1
    (r,) = json.loads(out)["results"]
    red = {e["category"] for e in r["ledger"]["entries"] if e["graph_verdict"] == "fails"}
    assert "WeakCrossWorld" in red
    assert r["deviation"] > 0.01


def test_compare_flags_shared_mediator_noise():
    code, out, _ = run("compare", SPECS["fig3_um2"], "--format", "json")
    assert code == 1
    results = json.loads(out)["results"]
    classical = [r for r in results if r["query"]["semantic"] == "classical"][0]
    interventional = [r for r in results if r["query"]["semantic"] == "interventional"][0]
    assert not classical["ok"] and interventional["ok"]


def test_identify_text_output():
    code, out, _ = run("identify", SPECS["fig3"], "--semantic", "separable", "--approach", "path",
                       "--format", "text")
    assert code == 0
    assert out.startswith("P(Y=y) = sum_")
    assert "z10" in out and "z11" in out


def test_identify_latex_and_json():
    code, out, _ = run("identify", SPECS["fig3"], "--semantic", "classical", "--format", "latex")
    assert code == 0 and "\\sum" in out
    code, out, _ = run("identify", SPECS["fig3"], "--semantic", "classical", "--format", "json")
    payload = json.loads(out)
    assert payload["results"][0]["ast"]["factors"]


@pytest.mark.parametrize("name", sorted(SPECS))
def test_compare_is_seed_deterministic(name):
    a = run("compare", SPECS[name], "--format", "json", "--seed", "3")
    b = run("compare", SPECS[name], "--format", "json", "--seed", "3")
    assert a == b


def test_random_sem_for_specs_without_parameters(tmp_path):
    spec = tmp_path / "g.spec"
    spec.write_text(
        "node Z role=exposure domain={0,1}\nnode M role=mediator order=1 domain={0,1}\n"
        "node Y role=outcome domain={0,1}\nedge Z -> M -> Y\nedge Z -> Y\n"
    )
    code, out, _ = run("compare", spec, "--semantic", "interventional", "--seed", "5", "--format", "json")
    assert code == 0
    assert json.loads(out)["results"][0]["sem"] == "random(seed=5)"
    assert run("compare", spec, "--semantic", "interventional", "--seed", "5", "--format", "json")[1] == out


def test_other_commands():
    assert run("validate", SPECS["fig8"])[0] == 0
    code, out, _ = run("swig", SPECS["fig3"], "--format", "json")
    assert code == 0 and "Y(m1,m2,z) _||_ Z | C" in json.loads(out)["independencies"]
    code, out, _ = run("expand", SPECS["fig3"], "--approach", "path", "--format", "json")
    assert code == 0 and json.loads(out)["ok"]
    assert run("check", SPECS["fig12"])[0] == 0
    assert run("check", SPECS["fig3_uv"], "--semantic", "classical")[0] == 1
    code, out, _ = run("oracle", SPECS["fig3"], "--semantic", "interventional", "--format", "json")
    assert code == 0 and 0 < json.loads(out)["results"][0]["oracle"] < 1


def test_estimate_and_csv_round_trip(tmp_path):
    csv_path = tmp_path / "d.csv"
    code, out, _ = run("estimate", SPECS["fig3"], "--semantic", "classical", "--n", 5000, "--seed", 2,
                       "--export-csv", csv_path, "--format", "json")
    assert code == 0
    first = json.loads(out)["results"][0]["estimate"]
    assert csv_path.read_text().splitlines()[0].split(",") == ["C", "Z", "M2", "M1", "Y"]
    code, out, _ = run("estimate", SPECS["fig3"], "--semantic", "classical", "--data", csv_path, "--format", "json")
    assert code == 0
    assert json.loads(out)["results"][0]["estimate"] == pytest.approx(first, abs=1e-12)


def test_figure(tmp_path):
    pytest.importorskip("matplotlib")
    png = tmp_path / "dev.png"
    code, _, _ = run("compare", SPECS["fig3"], "--figure", png)
    assert code == 0 and png.stat().st_size > 0


@pytest.mark.parametrize(
    "body, pos",
    [
        ("", "1:1"),
        ("node Z role=exposure domain={0,1}\nnode Y role=outcome domain={0,1}\nedge Z -> )\n", "3:11"),
    ],
)
def test_errors_exit_2_with_positions(tmp_path, body, pos):
    spec = tmp_path / "bad.spec"
    spec.write_text(body)
    code, out, err = run("validate", spec, "--format", "json")
    assert code == 2
    assert f"bad.spec:{pos}:" in err
    diag = json.loads(out)["diagnostics"][0]
    assert f"{diag['line']}:{diag['col']}" == pos


def test_usage_errors():
    assert run("compare", "no_such_spec")[0] == 2
    assert run("compare", SPECS["fig3"], "--semantic", "classical", "--labels", "1,0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        run("compare")
    assert exc.value.code == 2


def test_analysis_errors_exit_1():
    code, _, err = run("compare", SPECS["fig6"], "--semantic", "classical")
    assert code == 1
    assert "UnsupportedCombination" in err
    assert err.count(":") >= 3
