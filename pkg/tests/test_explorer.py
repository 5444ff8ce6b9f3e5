import dataclasses

import pytest

from solidcheck.errors import ReplayDivergence
from solidcheck.explorer import (
    BUDGET_EXHAUSTED, ERROR_FOUND, NO_VIOLATION, HarnessConfig, HarnessError, explore, explore_parallel, replay,
)
from solidcheck.semantics.choices import CallOutcome, HavocValue, Reenter
from solidcheck.semantics.transactions import CreateContractTx, ExecuteContract
from solidcheck.types import UINT_MAX

from support import compile_source, load_contract

WALLET_CFG = HarnessConfig("Wallet", tx_bound=3, value_domain=(0, 1, UINT_MAX))
AUCTION_CFG = HarnessConfig("Auction", tx_bound=3, value_domain=(0, 1, 2))


@pytest.fixture(scope="module")
def wallet():
    program = load_contract("wallet_overflow.sol", True)
    return program, explore(program, WALLET_CFG)


@pytest.fixture(scope="module")
def auction():
    program = load_contract("auction_call.sol", True)
    return program, explore(program, AUCTION_CFG)


def test_wallet_overflow_trace(wallet):
    program, trace = wallet
    assert trace.verdict == ERROR_FOUND
    assert isinstance(trace.steps[0].tx, CreateContractTx)
    calls = trace.calls
    assert len(calls) == 3
    assert [s.tx.function for s in calls] == ["open", "deposit", "deposit"]
    assert calls[-1].tx.value == UINT_MAX
    assert trace.site == ("Wallet", "deposit", 35)
    out = replay(program, WALLET_CFG, trace)
    assert out.status == "error" and out.final.site == trace.site


def test_wallet_needs_three_calls():
    program = load_contract("wallet_overflow.sol", True)
    assert explore(program, dataclasses.replace(WALLET_CFG, tx_bound=2)).verdict == NO_VIOLATION
    assert explore(program, dataclasses.replace(WALLET_CFG, value_domain=(0, 1))).verdict == NO_VIOLATION


def test_original_wallet_has_no_violation():
    program = load_contract("wallet.sol", True)
    assert explore(program, dataclasses.replace(WALLET_CFG, tx_bound=2)).verdict == NO_VIOLATION


def test_reentrancy_is_found(auction):
    program, trace = auction
    assert trace.verdict == ERROR_FOUND
    assert trace.site[:2] == ("Auction", "withdraw")
    reentries = [c for s in trace.steps for c in s.choices if isinstance(c, Reenter)]
    assert len(reentries) >= 1
    replay(program, AUCTION_CFG, trace)


def test_fixed_auction_is_safe():
    program = load_contract("auction_call_fixed.sol", True)
    for bound in (3, 4):
        assert explore(program, dataclasses.replace(AUCTION_CFG, tx_bound=bound)).verdict == NO_VIOLATION


def _mutations(choice):
    if isinstance(choice, HavocValue):
        for v in (0, 1, 2, UINT_MAX):
            if v != choice.value:
                yield HavocValue(choice.site, v)
    elif isinstance(choice, CallOutcome):
        yield CallOutcome(not choice.ok)
    elif isinstance(choice, Reenter):
        yield None  # drop the re-entry
        yield Reenter(choice.function, choice.args, choice.value + 1)


def _mutants(trace):
    for k, step in enumerate(trace.steps):
        for j, c in enumerate(step.choices):
            for new in _mutations(c):
                choices = step.choices[:j] + (() if new is None else (new,)) + step.choices[j + 1:]
                steps = list(trace.steps)
                steps[k] = dataclasses.replace(step, choices=choices)
                yield dataclasses.replace(trace, steps=steps)


@pytest.mark.parametrize("which", ["wallet", "auction"])
def test_mutated_choices_never_replay_silently(which, request):
    # a mutant either diverges or is itself a genuine counterexample reaching the recorded site
    program, trace = request.getfixturevalue(which)
    cfg = WALLET_CFG if which == "wallet" else AUCTION_CFG
    flagged = 0
    for m in _mutants(trace):
        try:
            out = replay(program, cfg, m)
        except ReplayDivergence:
            flagged += 1
            continue
        assert out.status == "error" and out.final.site == trace.site
    assert flagged >= 5


def _mutate_last(trace, pick, new):
    step = trace.steps[-1]
    choices = tuple(x for c in step.choices for x in ((new(c),) if pick(c) else (c,)) if x is not None)
    return dataclasses.replace(trace, steps=trace.steps[:-1] + [dataclasses.replace(step, choices=choices)])


def test_decisive_mutations_diverge(wallet, auction):
    program, trace = auction
    for pick, new in [
        (lambda c: isinstance(c, CallOutcome), lambda c: CallOutcome(not c.ok)),
        (lambda c: isinstance(c, Reenter), lambda c: None),
    ]:
        with pytest.raises(ReplayDivergence):
            replay(program, AUCTION_CFG, _mutate_last(trace, pick, new))
    program, trace = wallet
    broke = _mutate_last(trace, lambda c: isinstance(c, HavocValue), lambda c: HavocValue(c.site, 0))
    with pytest.raises(ReplayDivergence):
        replay(program, WALLET_CFG, broke)


def test_mutated_transaction_is_flagged(wallet):
    program, trace = wallet
    last = trace.steps[-1]
    steps = trace.steps[:-1] + [dataclasses.replace(last, tx=dataclasses.replace(last.tx, value=0))]
    with pytest.raises(ReplayDivergence):
        replay(program, WALLET_CFG, dataclasses.replace(trace, steps=steps))


def test_exploration_is_deterministic(wallet):
    program, trace = wallet
    again = explore(program, WALLET_CFG)
    assert again.steps == trace.steps and again.site == trace.site


@pytest.mark.parametrize("name,cfg", [("wallet_overflow.sol", WALLET_CFG), ("auction_call.sol", AUCTION_CFG)])
def test_parallel_search_matches_serial(name, cfg):
    program = load_contract(name, True)
    serial = explore(program, cfg)
    parallel = explore_parallel(program, cfg, 2)
    assert parallel.verdict == serial.verdict
    assert parallel.steps == serial.steps and parallel.site == serial.site


def _check(src, **kw):
    return explore(compile_source(src), HarnessConfig("C", **kw))


def test_immediate_violation_in_one_call():
    trace = _check("contract C { function f() public { Verification.Assert(false); } }", tx_bound=1)
    assert trace.verdict == ERROR_FOUND and len(trace.calls) == 1


def test_nothing_to_violate():
    trace = _check("contract C { uint x; function f(uint v) public { x = v; } }", tx_bound=2)
    assert trace.verdict == NO_VIOLATION


FUNCTION_HARNESS = """
contract C {
    uint x;
    function t() public { Verification.Assert(x == 0); }
    function u() public { require(false); Verification.Assert(false); }
}
"""


def test_function_harness_havocs_storage():
    trace = _check(FUNCTION_HARNESS, kind="function", function="t", value_domain=(0, 1))
    assert trace.verdict == ERROR_FOUND
    (call,) = trace.calls
    havocs = [c for s in trace.steps for c in s.choices if isinstance(c, HavocValue)]
    assert any(c.value == 1 for c in havocs)


def test_function_harness_fail_is_not_error():
    trace = _check(FUNCTION_HARNESS, kind="function", function="u", value_domain=(0, 1))
    assert trace.verdict == NO_VIOLATION


def test_function_harness_on_wallet_withdraw():
    program = load_contract("wallet.sol", True)
    cfg = HarnessConfig("Wallet", kind="function", function="withdraw", value_domain=(0, 1))
    assert explore(program, cfg).verdict == NO_VIOLATION


def test_budget_is_reported():
    trace = _check("contract C { function f() public { while (true) { } } }", tx_bound=1, step_budget=200)
    assert trace.verdict == BUDGET_EXHAUSTED


def test_constructor_is_not_callable():
    src = "contract C { bool armed; constructor() public { Verification.Assert(armed); } function f() public { } }"
    # the deploy itself violates; later calls never reach the constructor
    trace = _check(src, tx_bound=1)
    assert trace.verdict == ERROR_FOUND and not trace.calls
    trace = _check("contract C { function f() public { } }", tx_bound=2)
    assert all(isinstance(s.tx, (CreateContractTx, ExecuteContract)) and
               getattr(s.tx, "function", "f") == "f" for s in trace.steps)


@pytest.mark.parametrize("bad", [
    dict(kind="other"), dict(kind="function"), dict(value_domain=()), dict(address_universe=(1, 2)),
    dict(tx_bound=0), dict(value_domain=(-1,)),
])
def test_invalid_configs(bad):
    with pytest.raises(HarnessError):
        HarnessConfig("C", **bad).validate()
