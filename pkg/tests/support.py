"""Helpers shared by the test modules: compilation, minimal states and stepping."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from pyrsistent import pmap

from solidcheck import ast as A
from solidcheck.explicate import explicate
from solidcheck.semantics.choices import Cursor
from solidcheck.semantics.interp import Interpreter, SemanticsConfig
from solidcheck.semantics.state import SIMPLE, AddressCell, ChainState, ExecState, init_s, set_address
from solidcheck.typecheck import frontend

ROOT = Path(__file__).resolve().parent.parent
CONTRACTS = ROOT / "contracts"


def compile_source(source: str, solid: bool = True) -> A.Program:
    p = frontend(source)
    return explicate(p) if solid else p


def load_contract(name: str, solid: bool = True) -> A.Program:
    return compile_source((CONTRACTS / name).read_text(), solid)


def make_interp(program: A.Program, call_handler=None, **config) -> Interpreter:
    return Interpreter(program, SemanticsConfig(**config), call_handler)


def chain(interp: Interpreter, contracts: Dict[int, str] = None, simple: Dict[int, int] = None,
          balances: Dict[int, int] = None, time: int = 0) -> ChainState:
    """A chain with default-initialised contracts and funded simple addresses."""
    s = pmap()
    for a, bal in (simple or {}).items():
        s = set_address(s, a, AddressCell(SIMPLE, bal))
    for a, name in (contracts or {}).items():
        s = init_s(interp.info, s, a, name)
        bal = (balances or {}).get(a, 0)
        s = set_address(s, a, AddressCell(name, bal, s[a].members, s[a].storage))
    return ChainState(s, time)


def entered(interp: Interpreter, cs: ChainState, contract: str, function: str, args: Sequence = (),
            this: int = 1, sender: int = 2, value: int = 0) -> ExecState:
    """Execution state at the first statement of ``contract.function``."""
    f = interp.info.contracts[contract].function(function)
    shell = ExecState(cs.s, cs.time, sender, pmap(), pmap(), ())
    return interp.enter(shell, f, tuple(args), this, sender, value)


def step(interp: Interpreter, st: ExecState, pinned: Optional[Sequence] = None) -> List[Tuple[Tuple, ExecState]]:
    return list(interp.step(st, Cursor(pinned)))


def run(interp: Interpreter, st: ExecState, pinned: Optional[Sequence] = None) -> List[Tuple[Tuple, ExecState]]:
    return list(interp.run(st, Cursor(pinned)))


def skip(interp: Interpreter, st: ExecState, n: int) -> ExecState:
    """Advance ``n`` deterministic steps."""
    for _ in range(n):
        succ = step(interp, st)
        assert len(succ) == 1, succ
        st = succ[0][1]
    return st


def storage_value(interp: Interpreter, st, addr: int, name: str, comp: Tuple = ()):
    from solidcheck.semantics.state import storage_map

    x = (st.s if hasattr(st, "s") else st)[addr]

    rm = storage_map(interp.info, x)
    return _component(rm.read(x.members[name]).value, comp)


def _component(v, comp):
    if not comp:
        return v
    if comp[0] == "field":
        return v.get(comp[1])
    if comp[0] == "len":
        return v.length
    return v.get(comp[1], None)


def total_balance(s) -> int:
    return sum(cell.balance for cell in s.values())
