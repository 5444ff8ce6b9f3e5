"""Blockchain transactions: the top-level steps between blockchain states."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Iterator, Optional, Tuple

from pyrsistent import pmap

from .choices import Cursor
from .interp import Interpreter, outcome_of
from .state import (
    SIMPLE, UNUSED, AddressCell, ChainState, ExecState, Terminal, fresh_address, init_s, set_address,
)
from .values import UNKNOWN


@dataclass(frozen=True)
class CreateAddress:
    value: int


@dataclass(frozen=True)
class CurrencyTransfer:
    src: int
    dest: int
    value: int


@dataclass(frozen=True)
class CreateContractTx:
    src: int
    contract: str
    args: Tuple[Any, ...] = ()
    value: int = 0


@dataclass(frozen=True)
class ExecuteContract:
    src: int
    dest: int
    contract: str
    function: str
    args: Tuple[Any, ...] = ()
    value: int = 0


@dataclass(frozen=True)
class MintBlock:
    time: int


@dataclass(frozen=True)
class TxOutcome:
    """``status`` is committed, invalid (premise violated), fail, error or budget."""

    status: str
    choices: Tuple
    chain: ChainState  # post state when committed, otherwise the pre state
    final: Optional[ExecState] = None
    address: Optional[int] = None

    @property
    def committed(self) -> bool:
        return self.status == "committed"


def _shell(cs: ChainState, origin: int = 0) -> ExecState:
    l = pmap({"this": origin, "msg.sender": origin, "msg.value": 0})
    return ExecState(cs.s, cs.time, origin, pmap(), l, ())


def apply_transaction(interp: Interpreter, cs: ChainState, tx: Any, cur: Optional[Cursor] = None
                      ) -> Iterator[TxOutcome]:
    cur = cur or Cursor()
    if isinstance(tx, CreateAddress):
        a = fresh_address(cs.s, interp.config.address_universe)
        if a is None:
            yield TxOutcome("invalid", (), cs)
            return
        s = set_address(cs.s, a, AddressCell(SIMPLE, tx.value))
        yield TxOutcome("committed", (), ChainState(s, cs.time), address=a)
    elif isinstance(tx, CurrencyTransfer):
        yield from _currency_transfer(interp, cs, tx, cur)
    elif isinstance(tx, CreateContractTx):
        yield from _create_contract(interp, cs, tx, cur)
    elif isinstance(tx, ExecuteContract):
        yield from _execute(interp, cs, tx, cur)
    elif isinstance(tx, MintBlock):
        def premise(x):
            return x.time is UNKNOWN or tx.time > x.time
        if premise(_shell(cs)):
            yield TxOutcome("committed", (), ChainState(cs.s, tx.time))
        else:
            yield TxOutcome("invalid", (), cs)
    else:
        raise ValueError(f"unknown transaction {tx!r}")


def _currency_transfer(interp, cs, tx, cur):
    if cs.cell(tx.src).type != SIMPLE or cs.cell(tx.dest).type == UNUSED:
        yield TxOutcome("invalid", (), cs)
        return
    for ch, x, moved in interp.phase(_shell(cs, tx.src), lambda x: interp.set_bal(x, tx.src, tx.dest, tx.value), cur):
        if moved is None or isinstance(moved, Terminal):
            yield TxOutcome("invalid", ch, x.chain())
        else:
            yield TxOutcome("committed", ch, ChainState(moved, x.time))


def _create_contract(interp, cs, tx, cur):
    if cs.cell(tx.src).type != SIMPLE or tx.contract not in interp.info.contracts:
        yield TxOutcome("invalid", (), cs)
        return
    a = fresh_address(cs.s, interp.config.address_universe)
    if a is None:
        yield TxOutcome("invalid", (), cs)
        return
    ctor = interp.info.contracts[tx.contract].constructor
    shell = replace(_shell(cs, tx.src), s=init_s(interp.info, cs.s, a, tx.contract))
    for ch, x, moved in interp.phase(shell, lambda x: interp.set_bal(x, tx.src, a, tx.value), cur):
        if moved is None or isinstance(moved, Terminal):
            yield TxOutcome("invalid", ch, cs)
            continue
        start = interp.enter(replace(x, s=moved), ctor, tx.args, a, tx.src, tx.value)
        yield from _finish(interp, cs, ch, start, cur, address=a)


def _execute(interp, cs, tx, cur):
    contract = interp.info.contracts.get(tx.contract)
    if (cs.cell(tx.src).type != SIMPLE or cs.cell(tx.dest).type != tx.contract or contract is None):
        yield TxOutcome("invalid", (), cs)
        return
    f = next((g for g in contract.interface if g.name == tx.function), None)
    if f is None:
        yield TxOutcome("invalid", (), cs)
        return
    for ch, x, moved in interp.phase(_shell(cs, tx.src), lambda x: interp.set_bal(x, tx.src, tx.dest, tx.value),
                                     cur):
        if moved is None or isinstance(moved, Terminal):
            yield TxOutcome("invalid", ch, x.chain())
            continue
        start = interp.enter(replace(x, s=moved), f, tx.args, tx.dest, tx.src, tx.value)
        yield from _finish(interp, cs, ch, start, cur)


def _finish(interp, cs, ch, start, cur, address=None):
    for ch2, t in interp.run(start, cur):
        status = outcome_of(t)
        if status == "complete":
            yield TxOutcome("committed", ch + ch2, t.chain(), t, address)
        else:
            yield TxOutcome(status, ch + ch2, cs, t, address)
