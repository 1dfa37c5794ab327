import json

import pytest

from gametree import fixtures
from gametree.cli import main


@pytest.fixture()
def paths(tmp_path):
    out = {}
    for name in fixtures.GAMES:
        p = tmp_path / f"{name}.game.json"
        p.write_text(fixtures.fixture_text(f"{name}.game.json"))
        out[name] = str(p)
    prof = tmp_path / "ebos.profile.json"
    prof.write_text(fixtures.fixture_text("ebos.profile.json"))
    out["ebos.profile"] = str(prof)
    beh = tmp_path / "lrr.behavior.json"
    beh.write_text(fixtures.fixture_text("lrr.behavior.json"))
    out["lrr.behavior"] = str(beh)
    out["tmp"] = tmp_path
    return out


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_ok(paths, capsys):
    code, out, _ = run(capsys, "validate", paths["ebos"])
    assert code == 0
    assert json.loads(out) == {"ok": True, "violations": []}


def test_validate_reports_violations(paths, capsys):
    bad = paths["tmp"] / "bad.game.json"
    bad.write_text(json.dumps({"players": ["A"], "root": {
        "kind": "chance", "actions": [
            {"label": "l", "prob": "1/2",
             "child": {"kind": "terminal", "payoffs": ["0"]}},
            {"label": "r", "prob": "1/3",
             "child": {"kind": "terminal", "payoffs": ["0"]}}]}}))
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1
    doc = json.loads(out)
    assert not doc["ok"]
    assert doc["violations"][0]["kind"] == "chance-sum"


def test_validate_parse_error_exit_code(paths, capsys):
    broken = paths["tmp"] / "broken.game.json"
    broken.write_text("{\"players\": [\"A\"]")
    code, _out, err = run(capsys, "validate", str(broken))
    assert code == 3
    assert "error" in err


def test_info(paths, capsys):
    code, out, _ = run(capsys, "info", paths["surj"])
    doc = json.loads(out)
    assert code == 0
    assert doc["players"] == ["P1", "P2"]
    assert doc["per_player"]["P1"]["pure_strategies"] == 2
    assert doc["per_player"]["P2"]["pure_strategies"] == 8


def test_outcome(paths, capsys):
    code, out, _ = run(capsys, "outcome", paths["ebos"], paths["ebos.profile"])
    doc = json.loads(out)
    assert code == 0
    assert doc["NotU/X1/X2"] == "1/2"
    assert doc["NotU/Y1/Y2"] == "1/2"


def test_gap_efce_lrr(paths, capsys):
    code, out, err = run(capsys, "gap", paths["lrr"], paths["lrr.behavior"],
                         "--notion", "efce")
    doc = json.loads(out)
    assert code == 0
    assert doc["gap"] == "1/5"
    assert "0.2" in err


def test_gap_bce_lrr(paths, capsys):
    code, out, _ = run(capsys, "gap", paths["lrr"], paths["lrr.behavior"],
                       "--notion", "bce")
    assert code == 0
    assert json.loads(out)["gap"] == "1"


def test_gap_oracle_matches_dp(paths, capsys):
    _c, fast, _ = run(capsys, "gap", paths["lrr"], paths["lrr.behavior"],
                      "--notion", "efce")
    _c, slow, _ = run(capsys, "gap", paths["lrr"], paths["lrr.behavior"],
                      "--notion", "efce", "--oracle")
    assert json.loads(fast)["gap"] == json.loads(slow)["gap"] == "1/5"


def test_gap_oracle_refusal_exit_code(paths, capsys):
    code, _out, err = run(capsys, "gap", paths["ebos"], paths["ebos.profile"],
                          "--notion", "efce", "--oracle")
    assert code == 2
    assert "refused" in err


def test_gap_invalid_profile_exit_code(paths, capsys):
    bad = paths["tmp"] / "bad.profile.json"
    bad.write_text(json.dumps({"components": [{"alpha": "1", "strategies": [
        [{"beta": "1", "actions": {"R0": "L"}}]]}]}))
    code, _out, err = run(capsys, "gap", paths["lrr"], str(bad), "--notion", "efce")
    assert code == 1


def test_convert_reports_and_writes(paths, capsys):
    out_path = paths["tmp"] / "converted.json"
    code, _out, err = run(capsys, "convert", paths["ebos"], paths["ebos.profile"],
                          "-o", str(out_path))
    assert code == 0
    assert "efce gap in:  0" in err
    assert "bce gap out:  0" in err
    assert "outcome-equivalent: True" in err
    doc = json.loads(out_path.read_text())
    actions = {tuple(sorted(s[0]["actions"].items()))
               for c in doc["components"] for s in [c["strategies"][0]]}
    assert (("AfterNotU", "Y1"), ("AfterU", "X1"), ("Root", "NotU")) in actions


def test_convert_is_deterministic(paths, capsys):
    a = paths["tmp"] / "a.json"
    b = paths["tmp"] / "b.json"
    run(capsys, "convert", paths["lrr"], paths["lrr.behavior"], "-o", str(a))
    run(capsys, "convert", paths["lrr"], paths["lrr.behavior"], "-o", str(b))
    assert a.read_text() == b.read_text()


def test_decompose(paths, capsys):
    code, out, _ = run(capsys, "decompose", paths["lrr"], paths["lrr.behavior"])
    doc = json.loads(out)
    assert code == 0
    betas = sorted(item["beta"] for item in doc["components"][0]["strategies"][0])
    assert betas == ["1/10", "9/10"]


def test_cbr_command(paths, capsys):
    code, out, _ = run(capsys, "cbr", paths["ebos"], paths["ebos.profile"],
                       "--player", "P1", "--sequence", "Root:NotU")
    doc = json.loads(out)
    assert code == 0
    assert doc["strategy"] == {"Root": "U", "AfterU": "X1", "AfterNotU": "X1"}
    assert doc["value"] == "3/2"
    assert doc["event_mass"] == "1"


def test_cbr_empty_sequence(paths, capsys):
    code, out, _ = run(capsys, "cbr", paths["lrr"], paths["lrr.behavior"],
                       "--player", "0", "--sequence", "empty")
    doc = json.loads(out)
    assert code == 0
    assert doc["value"] == "2"


def test_solve_bce_surj(paths, capsys):
    code, out, err = run(capsys, "solve", paths["surj"], "--notion", "bce")
    assert code == 0
    report = json.loads(err)
    assert report["outputs"]["gap"] == "0"
    doc = json.loads(out)
    for comp in doc["components"]:
        assert comp["strategies"][1][0]["actions"]["CoopChoice"] == "E"


def test_solve_with_objective(paths, capsys):
    obj = paths["tmp"] / "obj.json"
    obj.write_text(json.dumps({"c": {"L": "2", "R/L'": "1"}}))
    code, _out, err = run(capsys, "solve", paths["lrr"], "--notion", "efce",
                          "--objective", str(obj))
    assert code == 0
    assert json.loads(err)["outputs"]["objective_value"] == "2"


def test_solve_rejects_unknown_objective_terminal(paths, capsys):
    obj = paths["tmp"] / "obj.json"
    obj.write_text(json.dumps({"c": {"nope": "1"}}))
    code, _out, _err = run(capsys, "solve", paths["lrr"], "--notion", "efce",
                           "--objective", str(obj))
    assert code == 1


def test_stdout_is_byte_identical_across_runs(paths, capsys):
    _c, first, _ = run(capsys, "gap", paths["lrr"], paths["lrr.behavior"],
                       "--notion", "bce")
    _c, second, _ = run(capsys, "gap", paths["lrr"], paths["lrr.behavior"],
                        "--notion", "bce")
    assert first == second


def test_paper_check_wiring(capsys, monkeypatch):
    # stub criteria: the command must print one line per sub-check and exit
    # nonzero exactly when one fails
    from gametree import checks

    def fake_pass():
        return [checks.CheckResult("x1", "stub pass", True)]

    def fake_fail():
        return [checks.CheckResult("x2", "stub fail", False, "want 1, got 2")]

    monkeypatch.setattr(checks, "CRITERIA",
                        (("x1", "stub", fake_pass), ("x2", "stub", fake_fail)))
    code, out, _ = run(capsys, "paper-check")
    assert code == 1
    assert "PASS criterion-x1" in out
    assert "FAIL criterion-x2: stub fail (want 1, got 2)" in out

    monkeypatch.setattr(checks, "CRITERIA", (("x1", "stub", fake_pass),))
    code, out, _ = run(capsys, "paper-check")
    assert code == 0
