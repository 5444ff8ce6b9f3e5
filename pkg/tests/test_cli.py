import json

import pytest

from solidcheck.cli import SCHEMA, main
from solidcheck.types import UINT_MAX

from support import CONTRACTS, ROOT

WALLET = str(CONTRACTS / "wallet.sol")
OVERFLOW = str(CONTRACTS / "wallet_overflow.sol")
SCRIPT = str(ROOT / "scripts" / "wallet_deposit.json")
DOMAIN = f"0,1,{UINT_MAX}"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _report(capsys, *argv):
    code, out, _ = run_cli(capsys, *argv, "--json")
    return code, json.loads(out)


def _strip_timing(report):
    report = dict(report)
    report["stats"] = {k: v for k, v in report["stats"].items() if k != "elapsedMs"}
    return report


def test_overflow_wallet_exits_1(capsys):
    code, rep = _report(capsys, "check", OVERFLOW, "--harness", "contract", "--bound", "3", "--domain", DOMAIN)
    assert code == 1 and rep["exitCode"] == 1
    assert rep["schema"] == SCHEMA
    assert rep["verdict"] == "ErrorFound"
    calls = [s for s in rep["trace"] if s["tx"]["kind"] == "ExecuteContract"]
    assert len(calls) == 3
    assert rep["site"] == {"contract": "Wallet", "function": "deposit", "line": 35}
    assert rep["replayConfirmed"] is True
    assert rep["input"]["digest"].startswith("sha256:")


def test_safe_wallet_exits_0(capsys):
    code, rep = _report(capsys, "check", WALLET, "--bound", "2", "--domain", "0,1")
    assert code == 0 and rep["verdict"] == "NoViolationWithinBound"
    assert "note" in rep


def test_budget_exit_2(tmp_path, capsys):
    src = tmp_path / "loop.sol"
    src.write_text("contract L { function f() public { while (true) { } } }")
    code, _, _ = run_cli(capsys, "check", str(src), "--bound", "1", "--step-budget", "100")
    assert code == 2


def test_text_report(capsys):
    code, out, _ = run_cli(capsys, "check", OVERFLOW, "--bound", "3", "--domain", DOMAIN)
    assert code == 1
    assert "assertion violated in Wallet.deposit at line 35" in out
    assert "replay: confirmed" in out


def test_report_is_deterministic(capsys):
    argv = ("check", OVERFLOW, "--bound", "3", "--domain", DOMAIN)
    first = _report(capsys, *argv)
    second = _report(capsys, *argv)
    assert _strip_timing(first[1]) == _strip_timing(second[1])


def test_parallel_report_matches_serial(capsys):
    argv = ("check", OVERFLOW, "--bound", "3", "--domain", DOMAIN)
    serial = _report(capsys, *argv)[1]
    parallel = _report(capsys, *argv, "--jobs", "2")[1]
    assert serial["trace"] == parallel["trace"] and serial["site"] == parallel["site"]


@pytest.mark.parametrize("argv", [
    ["check", WALLET, "--harness", "function"],
    ["check", "/nonexistent.sol"],
    ["check", WALLET, "--domain", "a,b"],
    ["check", WALLET, "--addresses", "2"],
    ["check", WALLET, "--contract", "Nope"],
    ["check", WALLET, "--bound", "0"],
    ["emit", WALLET, "--harness", "function"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_3(argv, capsys):
    code, _, err = run_cli(capsys, *argv)
    assert code == 3
    assert err


def test_input_errors_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.sol"
    bad.write_text("contract B { function f() public { x = 1; } }")
    assert run_cli(capsys, "check", str(bad))[0] == 3
    bad.write_text("contract B { uint8 y; }")
    assert run_cli(capsys, "check", str(bad))[0] == 3


def test_function_harness_flag(capsys):
    code, rep = _report(capsys, "check", WALLET, "--harness", "function", "--function", "withdraw",
                        "--domain", "0,1")
    assert code == 0
    assert rep["command"]["harness"] == "function" and rep["command"]["function"] == "withdraw"


def test_run_wallet_script(capsys):
    code, out, _ = run_cli(capsys, "run", WALLET, SCRIPT)
    assert code == 0
    rep = json.loads(out)
    assert [t["status"] for t in rep["transactions"]] == ["committed"] * 4
    wallet = next(a for a in rep["final"]["addresses"] if a["type"] == "Wallet")
    assert wallet["balance"] == 5
    (key, account), = wallet["members"]["accounts"]["entries"]
    assert account["balance"] == 5


def test_run_reports_invalid_transactions(tmp_path, capsys):
    script = tmp_path / "s.json"
    script.write_text(json.dumps([
        {"kind": "CreateAddress", "value": 1},
        {"kind": "CreateContract", "src": 1, "contract": "Wallet", "value": 0},
        {"kind": "ExecuteContract", "src": 1, "dest": 2, "function": "deposit", "value": 1},
    ]))
    code, out, _ = run_cli(capsys, "run", WALLET, str(script))
    assert code == 0
    assert [t["status"] for t in json.loads(out)["transactions"]][-1] == "fail"


def test_run_rejects_bad_scripts(tmp_path, capsys):
    script = tmp_path / "s.json"
    for body in ("not json", json.dumps([{"kind": "Teleport"}]), json.dumps({"transactions": 3})):
        script.write_text(body)
        assert run_cli(capsys, "run", WALLET, str(script))[0] == 3


def test_emit_to_file(tmp_path, capsys):
    target = tmp_path / "wallet.bpl"
    code, out, _ = run_cli(capsys, "emit", WALLET, "-o", str(target))
    assert code == 0 and out == ""
    from solidcheck.ivl.check import check_ivl
    text = target.read_text()
    assert check_ivl(text) == []
    assert text == (ROOT / "tests" / "goldens" / "wallet_contract.bpl").read_text()


def test_emit_desugared(capsys):
    from solidcheck.ivl.check import check_ivl
    code, out, _ = run_cli(capsys, "emit", WALLET, "--desugar-ivl")
    assert code == 0 and check_ivl(out) == []
    assert "record " not in out


def test_dump_solid(capsys):
    code, out, _ = run_cli(capsys, "dump", WALLET, "--stage", "solid")
    assert code == 0
    assert "require(msg.value == 0);" in out


def test_dump_ast(capsys):
    code, out, _ = run_cli(capsys, "dump", WALLET, "--stage", "ast")
    tree = json.loads(out)
    assert code == 0 and tree["kind"] == "Program"
    assert tree["contracts"][0]["name"] == "Wallet"


def test_config_file(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bound": 3, "domain": [0, 1, UINT_MAX]}))
    monkeypatch.setenv("SOLIDCHECK_CONFIG", str(cfg))
    code, rep = _report(capsys, "check", OVERFLOW)
    assert code == 1 and rep["command"]["bound"] == 3
    # flags override the file
    code, rep = _report(capsys, "check", OVERFLOW, "--bound", "2")
    assert code == 0 and rep["command"]["bound"] == 2


def test_bad_config_file(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]")
    monkeypatch.setenv("SOLIDCHECK_CONFIG", str(cfg))
    assert run_cli(capsys, "check", WALLET)[0] == 3


def test_version(capsys):
    assert run_cli(capsys, "--version")[0] == 0
