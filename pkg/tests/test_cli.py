import csv
import io
import json
import subprocess
import sys

import pytest

from kimpl.cli import main
from kimpl.io import fixture_path, parse_device, parse_game, parse_scheme
from kimpl.implementation import verify_implementation

from .helpers import CLI_COMMANDS as COMMANDS
from .helpers import fx


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def lines(text):
    return text.splitlines()


def test_analyze_reproduces_paid_game(capsys):
    code, out, _ = run(capsys, *COMMANDS[0])
    assert code == 0
    assert "equals_compare: true" in lines(out)
    assert "surviving: {f} x {s}" in lines(out)
    assert "target_contained: true" in lines(out)
    assert "worst_case_cost: 0" in lines(out)


def test_price_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "price", fx("m.game"), "--profile", "f,f")
    assert code == 0
    table = rows(out)
    assert table[0] == ["section", "key", "value"]
    assert ["result", "price", "2"] in table
    assert ["verification", "worst_case_cost", "2"] in table
    # the format flag is also accepted after the command name
    code2, out2, _ = run(capsys, "price", fx("m.game"), "--profile", "f,f", "--format", "csv")
    assert out2 == out


def test_implement_writes_scheme(capsys, tmp_path):
    dest = tmp_path / "scheme.json"
    code, out, _ = run(capsys, "implement", fx("m.game"), "--profile", "f,f", "--out", str(dest))
    assert code == 0
    game = parse_game(fixture_path("m.game").read_text())
    v = parse_scheme(dest.read_text(), game)
    rep = verify_implementation(game, v, {(0, 0)})
    assert rep.surviving_profiles() == [(0, 0)] and rep.worst_case_cost == 2


def test_exact(capsys):
    code, out, _ = run(capsys, *COMMANDS[3])
    assert code == 0
    for line in ("e1: 1", "e2: 1", "penalty: 5", "exact: true", "worst_case_cost: 2"):
        assert line in lines(out)


def test_brute(capsys):
    code, out, _ = run(capsys, *COMMANDS[4])
    assert code == 0 and "price: 0" in lines(out)
    code, _, _ = run(capsys, "brute", fx("m.game"), "--target", "f,f", "--grid", "0")
    assert code == 3


def test_brute_budget_is_a_precondition_failure(capsys):
    code, _, err = run(capsys, "brute", fx("m.game"), "--target", "f,f", "--cap", "1")
    assert code == 2 and "cap" in err


def test_device_build_and_reuse(capsys, tmp_path):
    dest = tmp_path / "m.device"
    code, out, _ = run(capsys, "device-build", fx("m.game"), "--dist", "f,s=1/2;s,f=1/2",
                       "--out", str(dest))
    assert code == 0
    assert "obedience_dominant: true" in lines(out)
    assert "device_cost: 0" in lines(out)
    game = parse_game(fixture_path("m.game").read_text())
    assert parse_device(dest.read_text(), game).bonus == 13
    code, out2, _ = run(capsys, "device-sim", fx("m.game"), "--device", str(dest),
                        "--seed", "7", "--rounds", "10000")
    assert code == 0 and "count(f,s): 4983" in lines(out2)


def test_literal_bonus_failure_exit_code(capsys, tmp_path):
    g = tmp_path / "g.game"
    g.write_text(json.dumps({"strategies": [["s", "x"], ["A", "B"]],
                             "payoffs": [[[0, 1], [2, 0]], [[2, 0], [-2, 1]]]}))
    code, out, _ = run(capsys, "device-build", str(g), "--mixed", "1/2,1/2;2/3,1/3",
                       "--bonus", "theorem")
    assert code == 3
    assert "obedience_dominant: false" in lines(out)
    code, _, _ = run(capsys, "device-build", str(g), "--mixed", "1/2,1/2;2/3,1/3")
    assert code == 0


def test_device_sim_with_deviation(capsys):
    code, out, _ = run(capsys, "device-sim", fx("m.game"), "--dist", "f,s=1/2;s,f=1/2",
                       "--seed", "1", "--rounds", "100", "--strategy", "f:f,s:s;f:f,s:f")
    assert code == 0
    assert "payments_all: 0" not in lines(out)


def test_corr_check(capsys):
    code, out, _ = run(capsys, *COMMANDS[7])
    assert code == 0 and "correlated_equilibrium: true" in lines(out)
    code, out, _ = run(capsys, "corr-check", fx("m.game"), "--dist", "f,f=1")
    assert code == 3 and "correlated_equilibrium: false" in lines(out)


def test_info_check(capsys):
    code, out, _ = run(capsys, *COMMANDS[8])
    assert code == 3
    assert "verdict: infeasible" in lines(out)
    assert "cycle_total: 8" in lines(out)
    code, _, _ = run(capsys, "info-check", fx("fig3.info"), "--target",
                     "s1:U1,t1:D2;s2:L1,t2:L2")
    assert code == 2


def test_vcg_run(capsys):
    code, out, _ = run(capsys, *COMMANDS[9])
    assert code == 0
    text = out.split("[scenario cheat]")
    assert "utility1: 1" in lines(text[0])
    assert "utility1: 1.1" in lines(text[1])
    code, out, _ = run(capsys, "vcg-run", fx("counterexample53.auction"), "--frugal", "yes",
                       "--scenario", "cheat", "--report", "utilities")
    assert code == 0 and "utility1: 1" in lines(out)
    code, out, _ = run(capsys, *COMMANDS[10])
    assert "payment1: 7" in lines(out) and "allocation: x->1 {}->2 {}->seller" in lines(out)


def test_sat_gadget(capsys):
    code, out, _ = run(capsys, *COMMANDS[11])
    assert code == 0 and "two_implementation: true" in lines(out)
    code, out, _ = run(capsys, *COMMANDS[12])
    assert out.count("two_implementation: false") == 4
    assert "two_implementation: true" not in out


@pytest.mark.parametrize("argv, code", [
    (["price", fx("m.game"), "--profile", "f,q"], 2),
    (["price", fx("m.game"), "--profile", "f"], 2),
    (["exact", fx("m.game"), "--rect", "f|s;f"], 2),
    (["price", "/nonexistent.game", "--profile", "f,f"], 4),
    (["info-check", fx("m.game"), "--target", "x:y;x:y"], 4),
    (["device-build", fx("m.game"), "--mixed", "1,0;1,0"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_bad_json_is_io_error(capsys, tmp_path):
    bad = tmp_path / "bad.game"
    bad.write_text('{"strategies": [["a"]], ')
    code, _, err = run(capsys, "price", str(bad), "--profile", "a")
    assert code == 4 and "line 1" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as err:
        main(["price"])
    assert err.value.code == 2


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_reruns_are_byte_identical(argv):
    for fmt in ("text", "csv"):
        cmd = [sys.executable, "-m", "kimpl.cli", "--format", fmt] + argv
        first = subprocess.run(cmd, capture_output=True)
        second = subprocess.run(cmd, capture_output=True)
        assert first.returncode in (0, 3)
        assert first.stdout and first.stdout == second.stdout
        assert first.returncode == second.returncode
