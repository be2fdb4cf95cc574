import io
import json
import re

import pytest

from fpl.cli import main
from fpl.dsl import parse_atoms, parse_formula, parse_trajectory
from fpl.normalize import to_lnf
from fpl.semantics import SemanticsConfig, compute_semantics

from conftest import FIXTURES


def fx(name):
    return str(FIXTURES / name)


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


DRIFT = ["--formula", fx("drift.fpl"), "--atoms", fx("drift_atoms.json"), "--trajectory", fx("drift_traj.csv")]
HANDOVER = ["--formula", fx("handover.fpl"), "--atoms", fx("handover_atoms.json")]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    import os

    for k in list(os.environ):
        if k.startswith("FPL_"):
            monkeypatch.delenv(k)


def test_monitor_max():
    assert run(["monitor", *DRIFT]) == (0, "8.000000\n", "")


def test_monitor_int_with_bound():
    code, out, _ = run(["monitor", *DRIFT, "--agg", "int", "--bound"])
    assert code == 0
    value, bound = out.splitlines()
    assert abs(float(value) - 12.9532985) < 1e-3
    assert re.fullmatch(r"bound \d+\.\d{6}", bound)


def test_monitor_inline_formula_and_short_trajectory(tmp_path):
    z = tmp_path / "short.csv"
    z.write_text("t,x,y\n0,0,-1\n2,2,-1\n")
    argv = ["monitor", "--formula", "p1", "--atoms", fx("drift_atoms.json"), "--trajectory", str(z)]
    assert run(argv) == (0, "inf\n", "")


def test_oracle_matches_monitor_on_a_single_atom():
    assert run(["oracle", *DRIFT])[1] == run(["monitor", *DRIFT])[1]


def test_oracle_handover():
    code, out, _ = run(["oracle", *HANDOVER, "--trajectory", fx("handover_traj.csv"), "--agg", "int",
                        "--grid", "0.125"])
    assert code == 0
    assert abs(float(out) - 24.28222) < 1e-4


def test_normalize_without_catalog():
    assert run(["normalize", "--formula", "(a|b).c"]) == (0, "(a . c) | (b . c)\n", "")
    assert run(["normalize", "--formula", "(a . b) U c"])[1] == "(a U c) | (a . (b U c))\n"


def test_normalize_with_catalog():
    code, out, _ = run(["normalize", "--formula", "p1 U p2", "--atoms", fx("handover_atoms.json")])
    assert (code, out) == (0, "p1 U p2\n")


def test_check_three_runs():
    code, out, _ = run(["check", *HANDOVER, "--automaton", fx("three_runs.json"), "--threshold", "13"])
    assert code == 0
    assert out == (
        "run 0 cruise@0 distance 5.656854\n"
        "run 1 cruise@0 -> climb@1 distance 16.000000\n"
        "run 2 cruise@0 -> climb@2 distance 12.000000\n"
        "worst run 1 distance 16.000000\n"
        "best run 0 distance 5.656854\n"
        "all_within false\n"
    )


@pytest.mark.parametrize("mode,verdict", [("ignore", "true"), ("lenient", "true"), ("strict", "false")])
def test_check_bound_modes(mode, verdict):
    code, out, _ = run(["check", *HANDOVER, "--automaton", fx("mean_follower.json"), "--threshold", "0.1",
                        "--bound-mode", mode])
    assert code == 0
    assert out.splitlines()[-1] == f"all_within {verdict}"


def test_learn_branch_and_monitor_the_result(tmp_path):
    out_file = tmp_path / "branch.fpl"
    dag_file = tmp_path / "dag.json"
    svg_file = tmp_path / "atoms.svg"
    code, out, _ = run(["learn", "--data", fx("branch"), "--out", str(out_file),
                        "--emit-dag", str(dag_file), "--emit-svg", str(svg_file)])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "A0 U_(51,53) (A1 | A2)"
    assert lines[1].startswith("A0 [X_0 = ")
    assert len(lines) == 4
    assert out_file.read_text() == lines[0] + "\n"
    dag = json.loads(dag_file.read_text())
    assert len(dag["nodes"]) == 3
    assert svg_file.read_text().startswith("<svg")

    # every demonstration should be close to the learned formula
    catalog = parse_atoms((tmp_path / "branch.json").read_text())
    f = to_lnf(parse_formula(out_file.read_text(), catalog))
    cfg = SemanticsConfig(delta_until=1.0)
    for csv in sorted((FIXTURES / "branch").glob("*.csv")):
        z = parse_trajectory(csv.read_text())
        assert compute_semantics(z, f, cfg) < 10.0
    code, out, _ = run(["monitor", "--formula", str(out_file), "--atoms", str(tmp_path / "branch.json"),
                        "--trajectory", str(FIXTURES / "branch" / "traj_00.csv"), "--delta-until", "1"])
    assert code == 0 and float(out) < 10.0


def test_plot(tmp_path):
    svg = tmp_path / "p.svg"
    code, out, _ = run(["plot", "--atoms", fx("handover_atoms.json"), "--trajectory", fx("handover_traj.csv"),
                        "--dim", "1", "--out", str(svg)])
    assert (code, out) == (0, f"{svg}\n")
    assert "<polyline" in svg.read_text() or "<path" in svg.read_text()


def test_env_defaults_and_flag_precedence(monkeypatch):
    monkeypatch.setenv("FPL_AGG", "int")
    code, out, _ = run(["monitor", *DRIFT])
    assert abs(float(out) - 12.9532985) < 1e-3
    assert run(["monitor", *DRIFT, "--agg", "max"])[1] == "8.000000\n"


def test_bad_env_value_is_a_usage_error(monkeypatch):
    monkeypatch.setenv("FPL_DELTA_UNTIL", "-1")
    code, _, err = run(["monitor", *DRIFT])
    assert code == 2 and "FPL_DELTA_UNTIL" in err


@pytest.mark.parametrize("argv,code", [
    ([], 2),
    (["monitor", "--atoms", fx("drift_atoms.json")], 2),
    (["monitor", *DRIFT, "--agg", "median"], 2),
    (["monitor", "--formula", "nope", "--atoms", fx("drift_atoms.json"), "--trajectory", fx("drift_traj.csv")], 1),
    (["monitor", "--formula", "p1", "--atoms", fx("missing.json"), "--trajectory", fx("drift_traj.csv")], 1),
    (["normalize", "--formula", "(a | "], 1),
    (["learn", "--data", fx("branch/none"), "--out", "/dev/null"], 1),
    (["plot", "--out", "/dev/null"], 2),
])
def test_exit_codes(argv, code, capsys):
    got, _, err = run(argv)
    assert got == code
    if code == 1:
        assert err.startswith("fpl: error: ")


def test_version(capsys):
    assert run(["--version"])[0] == 0
