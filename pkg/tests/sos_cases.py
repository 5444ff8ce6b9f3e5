"""One check per rule (and per conclusion of nondeterministic rules) of the small-step semantics.

Each case builds a minimal state, takes one step (or applies one transaction)
and asserts the conclusion's fields.  Layout of the minimal chain: ``Rules``
at address 1, a funded user at 2, a ``Callee`` at 3, an unfunded user at 4;
5 and 6 are unused.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, List

from solidcheck.semantics.choices import (
    CallTarget, FreshAddress, SendOutcome, TransferOutcome,
)
from solidcheck.semantics.state import ERROR, FAIL, SIMPLE, UNUSED, alloc, unallocated
from solidcheck.semantics.transactions import (
    CreateAddress, CreateContractTx, CurrencyTransfer, ExecuteContract, MintBlock, apply_transaction,
)
from solidcheck.semantics.values import ArrayRecV, Ref
from solidcheck.types import ArrayType, UINT

from support import chain, compile_source, entered, make_interp, skip, step, storage_value

RULES, USER, CALLEE, POOR = 1, 2, 3, 4
SOURCE = (Path(__file__).parent / "sos_program.sol").read_text()


@dataclass
class Case:
    table: str
    name: str
    check: Callable[[], None]


CASES: List[Case] = []


def case(table: str):
    def deco(fn):
        CASES.append(Case(table, fn.__name__, fn))
        return fn
    return deco


@lru_cache(maxsize=None)
def program():
    return compile_source(SOURCE, solid=False)


def interp():
    return make_interp(program(), address_universe=(1, 2, 3, 4, 5, 6))


def base(it, x=0, flag=False, rules_balance=5):
    cs = chain(it, contracts={RULES: "Rules", CALLEE: "Callee"}, simple={USER: 10, POOR: 0},
               balances={RULES: rules_balance})
    if x or flag:
        st = entered(it, cs, "Rules", "assign")
        st = it._write_leaf(st, st.s[RULES].members["x"], (), x)
        st = it._write_leaf(st, st.s[RULES].members["flag"], (), flag)
        cs = st.chain()
    return cs


def at(it, fname, args=(), value=0, sender=USER, **kw):
    return entered(it, base(it, **kw), "Rules", fname, args, RULES, sender, value)


def only(succ):
    assert len(succ) == 1, succ
    return succ[0]


def x_of(it, st, addr=RULES, name="x"):
    return storage_value(it, st, addr, name)


# -- transactions ------------------------------------------------------------------


@case("transactions")
def create_address():
    it = interp()
    cs = base(it)
    out = only(list(apply_transaction(it, cs, CreateAddress(100))))
    assert out.status == "committed" and out.address == 5
    assert out.chain.cell(5).type == SIMPLE and out.chain.cell(5).balance == 100
    assert out.chain.cell(6).type == UNUSED


@case("transactions")
def currency_transfer():
    it = interp()
    cs = base(it)
    out = only(list(apply_transaction(it, cs, CurrencyTransfer(USER, CALLEE, 4))))
    assert out.status == "committed"
    assert out.chain.cell(USER).balance == 6 and out.chain.cell(CALLEE).balance == 4
    assert out.chain.cell(CALLEE).storage == cs.cell(CALLEE).storage


@case("transactions")
def currency_transfer_premises():
    it = interp()
    cs = base(it)
    too_much = only(list(apply_transaction(it, cs, CurrencyTransfer(USER, POOR, 11))))
    from_contract = only(list(apply_transaction(it, cs, CurrencyTransfer(RULES, USER, 1))))
    to_unused = only(list(apply_transaction(it, cs, CurrencyTransfer(USER, 6, 1))))
    for out in (too_much, from_contract, to_unused):
        assert out.status == "invalid" and out.chain == cs


@case("transactions")
def create_contract():
    it = interp()
    cs = base(it)
    out = only(list(apply_transaction(it, cs, CreateContractTx(USER, "Callee", (), 0))))
    assert out.status == "committed" and out.address == 5
    assert out.chain.cell(5).type == "Callee"
    assert x_of(it, out.chain.s, 5, "y") == 0
    assert out.final.origin == USER


@case("transactions")
def create_contract_constructor_fails():
    it = interp()
    cs = base(it)
    out = only(list(apply_transaction(it, cs, CreateContractTx(USER, "Failing", (), 0))))
    assert out.status == "fail" and out.chain == cs


@case("transactions")
def execute_contract():
    it = interp()
    cs = base(it)
    out = only(list(apply_transaction(it, cs, ExecuteContract(USER, CALLEE, "Callee", "gp", (7,), 3))))
    assert out.status == "committed"
    assert x_of(it, out.chain.s, CALLEE, "y") == 7
    assert out.chain.cell(USER).balance == 7 and out.chain.cell(CALLEE).balance == 3
    assert out.final.origin == USER


@case("transactions")
def execute_contract_premise():
    it = interp()
    cs = base(it)
    wrong_type = only(list(apply_transaction(it, cs, ExecuteContract(USER, RULES, "Callee", "g", (1,), 0))))
    assert wrong_type.status == "invalid" and wrong_type.chain == cs


@case("transactions")
def mint_block():
    it = interp()
    cs = base(it)
    later = only(list(apply_transaction(it, cs, MintBlock(9))))
    assert later.status == "committed" and later.chain.time == 9 and later.chain.s == cs.s
    same = only(list(apply_transaction(it, later.chain, MintBlock(9))))
    assert same.status == "invalid" and same.chain.time == 9


# -- simple statements ---------------------------------------------------------------


@case("simple statements")
def while_condition_true():
    it = interp()
    st = at(it, "loop")
    loop = st.c[0]
    _, nxt = only(step(it, st))
    assert nxt.c == tuple(loop.body) + (loop,) + st.c[1:]


@case("simple statements")
def while_condition_false():
    it = interp()
    st = at(it, "loop", x=1)
    _, nxt = only(step(it, st))
    assert nxt.c == st.c[1:]


@case("simple statements")
def if_condition_true():
    it = interp()
    st = at(it, "branch", flag=True)
    _, nxt = only(step(it, st))
    assert nxt.c == tuple(st.c[0].then) + st.c[1:]


@case("simple statements")
def if_condition_false():
    it = interp()
    st = at(it, "branch")
    _, nxt = only(step(it, st))
    assert nxt.c == tuple(st.c[0].orelse) + st.c[1:]


@case("simple statements")
def variable_declaration():
    it = interp()
    st = at(it, "declare")
    _, nxt = only(step(it, st))
    assert nxt.c == st.c[1:] and nxt.l == st.l and nxt.s == st.s and nxt.m == st.m


@case("simple statements")
def assignment():
    it = interp()
    st = at(it, "assign")
    _, nxt = only(step(it, st))
    assert x_of(it, nxt) == 7 and nxt.c == ()
    assert nxt.l == st.l and nxt.m == st.m


@case("simple statements")
def return_statement():
    it = interp()
    st = at(it, "give")
    _, nxt = only(step(it, st))
    assert nxt.l["o"] == 5 and nxt.c == ()


@case("simple statements")
def alloc_memory():
    it = interp()
    st = skip(it, at(it, "allocate"), 1)
    _, nxt = only(step(it, st))
    ref = nxt.l["a"]
    assert isinstance(ref, Ref) and ref.space == "M"
    assert unallocated(st.m, ref)
    expected = alloc(it.info, st.m, ref, ArrayType(UINT))
    assert set(nxt.m.keys()) == set(expected.keys())
    cell = nxt.m[ref]
    assert cell.type == ArrayType(UINT) and isinstance(cell.value, ArrayRecV) and cell.value.length == 2
    assert nxt.c == ()


@case("simple statements")
def revert_statement():
    it = interp()
    _, nxt = only(step(it, at(it, "abort")))
    assert nxt.c is FAIL


@case("simple statements")
def require_holds():
    it = interp()
    st = at(it, "guard", flag=True)
    _, nxt = only(step(it, st))
    assert nxt.c == st.c[1:] and nxt.s == st.s


@case("simple statements")
def require_fails():
    it = interp()
    _, nxt = only(step(it, at(it, "guard")))
    assert nxt.c is FAIL


@case("simple statements")
def transfer_to_address():
    it = interp()
    st = at(it, "pay", (POOR,))
    ch, nxt = only(step(it, st))
    assert ch == ()
    assert nxt.s[RULES].balance == 4 and nxt.s[POOR].balance == 1
    assert nxt.c == st.c[1:]


@case("simple statements")
def transfer_to_contract_succeeds():
    it = interp()
    st = at(it, "pay", (CALLEE,))
    succ = step(it, st)
    assert [c for c, _ in succ] == [(TransferOutcome(True),), (TransferOutcome(False),)]
    nxt = succ[0][1]
    assert nxt.s[RULES].balance == 4 and nxt.s[CALLEE].balance == 1
    assert nxt.c == st.c[1:]


@case("simple statements")
def transfer_to_contract_fails():
    it = interp()
    st = at(it, "pay", (CALLEE,))
    _, nxt = step(it, st, [TransferOutcome(False)])[0]
    assert nxt.c is FAIL


@case("simple statements")
def transfer_to_unused_address():
    it = interp()
    _, nxt = only(step(it, at(it, "pay", (6,))))
    assert nxt.c is FAIL


@case("simple statements")
def send_to_address():
    it = interp()
    st = skip(it, at(it, "trySend", (POOR,)), 1)
    ch, nxt = only(step(it, st))
    assert ch == ()
    assert nxt.l["ok"] is True
    assert nxt.s[RULES].balance == 4 and nxt.s[POOR].balance == 1
    assert nxt.c == st.c[1:]


@case("simple statements")
def send_to_contract_succeeds():
    it = interp()
    st = skip(it, at(it, "trySend", (CALLEE,)), 1)
    succ = step(it, st)
    assert [c for c, _ in succ] == [(SendOutcome(True),), (SendOutcome(False),)]
    nxt = succ[0][1]
    assert nxt.l["ok"] is True and nxt.s[CALLEE].balance == 1 and nxt.s[RULES].balance == 4
    assert nxt.c == st.c[1:]


@case("simple statements")
def send_to_contract_fails():
    it = interp()
    st = skip(it, at(it, "trySend", (CALLEE,)), 1)
    _, nxt = only(step(it, st, [SendOutcome(False)]))
    assert nxt.l["ok"] is False and nxt.s == st.s
    assert nxt.c == st.c[1:]


@case("simple statements")
def verification_assume():
    it = interp()
    _, failed = only(step(it, at(it, "assume")))
    assert failed.c is FAIL
    st = at(it, "assume", flag=True)
    _, passed = only(step(it, st))
    assert passed.c == st.c[1:]


@case("simple statements")
def verification_assert():
    it = interp()
    _, violated = only(step(it, at(it, "check")))
    assert violated.c is ERROR
    assert violated.site[0] == "Rules" and violated.site[1] == "check"
    st = at(it, "check", flag=True)
    _, held = only(step(it, st))
    assert held.c == st.c[1:]


# -- function-call statements --------------------------------------------------------------


@case("function calls")
def contract_call_completes():
    it = interp()
    st = skip(it, at(it, "callInternal", (CALLEE,)), 1)
    _, nxt = only(step(it, st))
    assert nxt.l["r"] == 4
    assert x_of(it, nxt, CALLEE, "y") == 3
    assert nxt.c == st.c[1:] and nxt.l["this"] == RULES


@case("function calls")
def contract_call_moves_value():
    it = interp()
    st = skip(it, at(it, "callPaying", (CALLEE,)), 1)
    _, nxt = only(step(it, st))
    assert nxt.l["r"] == 3
    assert nxt.s[RULES].balance == 4 and nxt.s[CALLEE].balance == 1


@case("function calls")
def contract_call_fails():
    it = interp()
    _, nxt = only(step(it, at(it, "callBad", (CALLEE,))))
    assert nxt.c is FAIL


@case("function calls")
def contract_call_errors():
    it = interp()
    _, nxt = only(step(it, at(it, "callBoom", (CALLEE,))))
    assert nxt.c is ERROR and nxt.site[:2] == ("Callee", "boom")


@case("function calls")
def contract_call_wrong_type():
    it = interp()
    st = skip(it, at(it, "callInternal", (POOR,)), 1)
    _, nxt = only(step(it, st))
    assert nxt.c is FAIL


@case("function calls")
def call_simple_address():
    it = interp()
    st = skip(it, at(it, "lowLevel", (POOR,)), 1)
    ch, nxt = only(step(it, st))
    assert ch == ()
    assert nxt.l["ok"] is True
    assert nxt.s[RULES].balance == 4 and nxt.s[POOR].balance == 1
    assert nxt.c == st.c[1:]


def _low_level_contract(target):
    it = interp()
    st = skip(it, at(it, "lowLevel", (CALLEE,)), 1)
    succ = [(c, s) for c, s in step(it, st) if c[0] == target]
    return st, succ


@case("function calls")
def call_contract_completes():
    st, succ = _low_level_contract(CallTarget("g", (1,)))
    _, nxt = only(succ)
    it = interp()
    assert nxt.l["ok"] is True
    assert x_of(it, nxt, CALLEE, "y") == 1
    assert nxt.s[CALLEE].balance == 1 and nxt.s[RULES].balance == 4
    assert nxt.c == st.c[1:]


@case("function calls")
def call_contract_fails():
    st, succ = _low_level_contract(CallTarget("bad", ()))
    _, nxt = only(succ)
    assert nxt.l["ok"] is False
    assert nxt.s == st.s and nxt.m == st.m
    assert nxt.c == st.c[1:]


@case("function calls")
def call_contract_errors():
    _, succ = _low_level_contract(CallTarget("boom", ()))
    _, nxt = only(succ)
    assert nxt.c is ERROR


@case("function calls")
def call_contract_ranges_over_interface():
    it = interp()
    st = skip(it, at(it, "lowLevel", (CALLEE,)), 1)
    targets = {c[0].function for c, _ in step(it, st)}
    assert targets == {"g", "gp", "bad", "boom"}


@case("function calls")
def create_contract_completes():
    it = interp()
    st = skip(it, at(it, "create"), 1)
    ch, nxt = only(step(it, st))
    assert ch == (FreshAddress(5),)
    assert nxt.l["c"] == 5 and nxt.s[5].type == "Callee"
    assert nxt.c == st.c[1:]


@case("function calls")
def create_contract_fails():
    it = interp()
    st = skip(it, at(it, "createFailing"), 1)
    _, nxt = only(step(it, st))
    assert nxt.c is FAIL


@case("function calls")
def create_contract_errors():
    it = interp()
    st = skip(it, at(it, "createBroken"), 1)
    _, nxt = only(step(it, st))
    assert nxt.c is ERROR
