"""Acceptance suite: one test per criterion, each under its time limit.

A summary line per criterion is printed at the end of the session (see
conftest.py).
"""

import json
import random
import time

from solidcheck.cli import main
from solidcheck.explorer import ERROR_FOUND, NO_VIOLATION, HarnessConfig, explore, replay
from solidcheck.ivl import emit_program, print_program
from solidcheck.ivl.check import check_ivl
from solidcheck.ivl.desugar import desugar
from solidcheck.semantics.choices import Reenter
from solidcheck.types import UINT_MAX

from explicate_cases import check_goldens
from frontend_cases import COPY_TABLE, check_copy_table
from ivl_cases import check_allocation_golden
from oracle_cases import compare
from property_cases import Tally, check_injectivity, check_random_case
from sos_cases import CASES
from support import CONTRACTS, load_contract


class Timer:
    def __init__(self, limit: float):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f} s, limit {self.limit} s"


def test_criterion_1_copy_table():
    with Timer(1.0):
        assert len(COPY_TABLE) == 7
        assert check_copy_table() >= 7


def test_criterion_2_explication_goldens():
    with Timer(1.0):
        check_goldens()


def test_criterion_3_sos_suite():
    with Timer(5.0):
        assert len(CASES) >= 25
        assert {c.table for c in CASES} == {"transactions", "simple statements", "function calls"}
        for case in CASES:
            case.check()


def test_criterion_4_atomicity_and_conservation():
    tally = Tally()
    with Timer(60.0):
        for seed in range(1000):
            check_random_case(random.Random(seed), tally)
    assert tally.programs == 1000
    assert tally.reverted > 0 and tally.statuses.get("committed", 0) > 0


def test_criterion_5_oracle_equivalence():
    with Timer(120.0):
        result = compare(range(60))
    assert result.checked == 120
    assert result.mismatches == []


def test_criterion_6_wallet_end_to_end(capsys):
    path = str(CONTRACTS / "wallet_overflow.sol")
    with Timer(30.0):
        code = main(["check", path, "--harness", "contract", "--bound", "3", "--domain", f"0,1,{UINT_MAX}", "--json"])
        report = json.loads(capsys.readouterr().out)
        program = load_contract("wallet_overflow.sol", True)
        cfg = HarnessConfig("Wallet", tx_bound=3, value_domain=(0, 1, UINT_MAX))
        trace = explore(program, cfg)
        out = replay(program, cfg, trace)
    assert code == 1
    calls = [s for s in report["trace"] if s["tx"]["kind"] == "ExecuteContract"]
    assert len(calls) == 3 and calls[-1]["tx"]["function"] == "deposit"
    assert report["site"] == {"contract": "Wallet", "function": "deposit", "line": 35}
    assert report["replayConfirmed"] is True
    assert out.status == "error" and out.final.site == ("Wallet", "deposit", 35)


def test_criterion_7_reentrancy():
    cfg = HarnessConfig("Auction", tx_bound=3, value_domain=(0, 1, 2))
    with Timer(60.0):
        buggy = explore(load_contract("auction_call.sol", True), cfg)
        fixed = explore(load_contract("auction_call_fixed.sol", True), cfg)
    assert buggy.verdict == ERROR_FOUND
    assert sum(isinstance(c, Reenter) for s in buggy.steps for c in s.choices) >= 1
    assert fixed.verdict == NO_VIOLATION


def test_criterion_8_ivl_goldens():
    with Timer(5.0):
        check_allocation_golden()
        program = load_contract("wallet.sol", True)
        ivl = emit_program(program, "Wallet")
        assert check_ivl(print_program(ivl)) == []
        assert check_ivl(print_program(desugar(ivl))) == []


def test_criterion_9_allocation_injectivity():
    rng = random.Random(2024)
    with Timer(10.0):
        cells = sum(check_injectivity(rng, allocs=100) for _ in range(25))
    assert cells > 0
