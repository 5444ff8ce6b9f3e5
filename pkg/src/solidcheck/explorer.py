"""Bounded model checking by exhaustive enumeration under verification harnesses.

The contract harness deploys the checked contract and then runs every
sequence of interface calls up to a bound; the function harness calls one
function once from a state whose storage holds arbitrary basic values.  Each
call ranges over senders, arguments and values drawn from finite domains.
Search is depth first in a fixed order and stops at the first assertion
violation, which is returned as a replayable trace.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pyrsistent import pmap

from . import ast as A
from .errors import ReplayDivergence, SolidError
from .semantics.choices import CallOutcome, Cursor, Reenter, describe, encode
from .semantics.interp import Interpreter, SemanticsConfig, _prefixed
from .semantics.state import (
    FAIL, SIMPLE, AddressCell, ChainState, Terminal, havoc_storage, init_s, set_address,
)
from .semantics.transactions import CreateContractTx, ExecuteContract, TxOutcome, apply_transaction
from .semantics.values import UNKNOWN, to_json
from .types import UINT_MAX

ERROR_FOUND = "ErrorFound"
NO_VIOLATION = "NoViolationWithinBound"
BUDGET_EXHAUSTED = "BudgetExhausted"

EXIT_CODES = {NO_VIOLATION: 0, ERROR_FOUND: 1, BUDGET_EXHAUSTED: 2}


class HarnessError(SolidError):
    """Invalid harness configuration (unknown contract or function, bad domains)."""


@dataclass
class HarnessConfig:
    contract: str
    kind: str = "contract"  # contract | function
    function: Optional[str] = None
    tx_bound: int = 4
    value_domain: Tuple[int, ...] = (0, 1, 2, UINT_MAX)
    address_universe: Tuple[int, ...] = (1, 2, 3, 4)
    step_budget: int = 10_000
    call_depth: int = 2
    length_cap: int = 3
    memoize: bool = True
    max_states: Optional[int] = 2_000_000

    def validate(self) -> None:
        if self.kind not in ("contract", "function"):
            raise HarnessError(f"unknown harness kind {self.kind!r}")
        if self.kind == "function" and not self.function:
            raise HarnessError("the function harness needs a function name")
        if not self.value_domain:
            raise HarnessError("value domain must not be empty")
        if any(v < 0 or v > UINT_MAX for v in self.value_domain):
            raise HarnessError("value domain entries must be uint256 values")
        if len(set(self.address_universe)) < 3:
            raise HarnessError("address universe needs at least 3 distinct addresses")
        if any(a <= 0 for a in self.address_universe):
            raise HarnessError("addresses must be positive (0 is the null address)")
        if self.tx_bound < 1:
            raise HarnessError("transaction bound must be at least 1")
        if self.call_depth < 0 or self.step_budget < 1:
            raise HarnessError("call depth and step budget must be non-negative / positive")

    def semantics(self) -> SemanticsConfig:
        return SemanticsConfig(value_domain=tuple(self.value_domain),
                               address_universe=tuple(self.address_universe),
                               step_budget=self.step_budget, length_cap=self.length_cap)

    @property
    def main(self) -> int:
        return self.address_universe[0]

    @property
    def users(self) -> Tuple[int, ...]:
        return tuple(self.address_universe[1:-1])


@dataclass(frozen=True)
class TraceStep:
    tx: Any
    choices: Tuple
    cexprints: Tuple
    status: str

    def to_json(self) -> Dict[str, Any]:
        return {
            "tx": tx_json(self.tx),
            "choices": [encode(c) for c in self.choices],
            "cexprints": [{"name": n, "value": to_json(v), "line": line} for n, v, line in self.cexprints],
            "status": self.status,
        }


@dataclass
class Trace:
    verdict: str
    steps: List[TraceStep] = field(default_factory=list)
    site: Optional[Tuple] = None
    stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def calls(self) -> List[TraceStep]:
        return [s for s in self.steps if isinstance(s.tx, ExecuteContract)]

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"verdict": self.verdict, "trace": [s.to_json() for s in self.steps],
                               "stats": dict(self.stats)}
        if self.site is not None:
            contract, function, line = self.site
            out["site"] = {"contract": contract, "function": function, "line": line}
        return out

    def lines(self) -> List[str]:
        """Human-readable listing, one line per transaction."""
        out = []
        for k, s in enumerate(self.steps):
            tx = s.tx
            if isinstance(tx, CreateContractTx):
                head = f"#{k} deploy {tx.contract}({_args(tx.args)}) from {tx.src} value {tx.value}"
            else:
                head = f"#{k} call {tx.function}({_args(tx.args)}) from {tx.src} value {tx.value}"
            out.append(f"{head} [{', '.join(describe(c) for c in s.choices)}] => {s.status}")
            for name, v, line in s.cexprints:
                out.append(f"    {name}({v!r}) at line {line}")
        return out


def _args(args) -> str:
    return ", ".join("<default>" if a is None else repr(a) for a in args)


def tx_json(tx: Any) -> Dict[str, Any]:
    if isinstance(tx, CreateContractTx):
        return {"kind": "CreateContract", "src": tx.src, "contract": tx.contract,
                "args": [encode(a) for a in tx.args], "value": encode(tx.value)}
    return {"kind": "ExecuteContract", "src": tx.src, "dest": tx.dest, "contract": tx.contract,
            "function": tx.function, "args": [encode(a) for a in tx.args], "value": encode(tx.value)}


# -- havoc ----------------------------------------------------------------------------


def havoc_environment(info, s, keep: Optional[int]):
    """Unknown balances and basic storage values for every address except ``keep``."""
    out = s
    for a, cell in s.items():
        if a == keep:
            continue
        new = replace(cell, balance=UNKNOWN)
        if cell.type in info.contracts:
            new = havoc_storage(info, new)
        out = set_address(out, a, new)
    return out


# -- low-level call stubs -------------------------------------------------------------


class ReentrantCallStub:
    """Contract-harness treatment of a low-level call.

    The callee may re-enter the main contract through any sequence of its
    interface functions (at most ``call_depth`` long, nested at most
    ``call_depth`` deep), after which the call returns True; or the call
    reverts and returns False with the pre-call state.  Re-entries that fail
    are dropped.
    """

    def __init__(self, main: int, contract: A.Contract, config: HarnessConfig):
        self.main = main
        self.contract = contract
        self.config = config

    def __call__(self, interp, st, s, rest, addr, value, moved, cur):
        if moved is None:
            yield from interp.finish(st, [s.lhs], [False], rest, cur)
            return
        yield from self._sequence(interp, st, replace(st, s=moved), s, rest, addr,
                                  self.config.call_depth, True, cur)

    def _options(self, interp, st, left, first):
        opts: List[Any] = [CallOutcome(True)]
        if left > 0 and st.reentry < self.config.call_depth:
            for f in self.contract.interface:
                values = self.config.value_domain if f.payable else (0,)
                for args in interp.argument_tuples(f):
                    for v in dict.fromkeys(values):
                        opts.append(Reenter(f.name, tuple(args), v))
        if first:
            opts.append(CallOutcome(False))
        return opts

    def _sequence(self, interp, pre, st, s, rest, addr, left, first, cur):
        for o in cur.pick(self._options(interp, st, left, first)):
            if isinstance(o, CallOutcome):
                base = st if o.ok else pre
                yield from _prefixed((o,), interp.finish(base, [s.lhs], [o.ok], rest, cur))
                continue
            yield from _prefixed((o,), self._reenter(interp, pre, st, s, rest, addr, left, o, cur))

    def _reenter(self, interp, pre, st, s, rest, addr, left, o, cur):
        f = self.contract.function(o.function)
        for ch, x, moved in interp.phase(st, lambda x: interp.set_bal(x, addr, self.main, o.value), cur):
            if moved is None or isinstance(moved, Terminal):
                continue
            callee = interp.enter(replace(x, s=moved, reentry=x.reentry + 1), f, o.args, self.main, addr, o.value)
            for ch2, t in interp.run(callee, cur):
                if t.c is FAIL:
                    continue
                back = interp.returned(x, t)
                if isinstance(t.c, Terminal):
                    yield ch + ch2, replace(back, c=t.c)
                    continue
                yield from _prefixed(ch + ch2, self._sequence(interp, pre, back, s, rest, addr, left - 1,
                                                              False, cur))


def havoc_call_stub(interp, st, s, rest, addr, value, moved, cur):
    """Function-harness call: either revert, or succeed with every balance and storage value havoc'd."""
    opts = ([CallOutcome(True)] if moved is not None else []) + [CallOutcome(False)]
    for o in cur.pick(opts):
        if o.ok:
            havocked = replace(st, s=havoc_environment(interp.info, moved, None))
            yield from _prefixed((o,), interp.finish(havocked, [s.lhs], [True], rest, cur))
        else:
            yield from _prefixed((o,), interp.finish(st, [s.lhs], [False], rest, cur))


# -- the explorer -----------------------------------------------------------------------


class _OutOfStates(Exception):
    pass


class Explorer:
    def __init__(self, program: A.Program, config: HarnessConfig):
        config.validate()
        self.program = program
        self.config = config
        contracts = {c.name: c for c in program.contracts}
        if config.contract not in contracts:
            raise HarnessError(f"unknown contract {config.contract!r}")
        self.contract = contracts[config.contract]
        if config.kind == "function":
            f = next((g for g in self.contract.interface if g.name == config.function), None)
            if f is None:
                raise HarnessError(f"{config.function!r} is not an interface function of {config.contract}")
            self.function = f
            handler = havoc_call_stub
        else:
            self.function = None
            handler = ReentrantCallStub(config.main, self.contract, config)
        self.interp = Interpreter(program, config.semantics(), handler)
        self.states = 0
        self.pruned = 0
        self.budget_hit = False
        self._seen: Dict[ChainState, int] = {}
        self._site: Optional[Tuple] = None

    # initial states

    def base_state(self) -> ChainState:
        s = pmap()
        for u in self.config.users:
            s = set_address(s, u, AddressCell(SIMPLE, UNKNOWN))
        if self.config.kind == "function":
            s = init_s(self.interp.info, s, self.config.main, self.contract.name)
            cell = havoc_storage(self.interp.info, replace(s[self.config.main], balance=UNKNOWN))
            s = set_address(s, self.config.main, cell)
        return ChainState(s, UNKNOWN)

    def between_calls(self, cs: ChainState) -> ChainState:
        return ChainState(havoc_environment(self.interp.info, cs.s, self.config.main), UNKNOWN)

    # transaction enumeration

    def _values(self, f: Optional[A.Function]):
        if f is not None and f.payable:
            return list(dict.fromkeys(self.config.value_domain))
        return [0]

    def deployments(self) -> Iterator[CreateContractTx]:
        ctor = self.contract.constructor
        tuples = self.interp.argument_tuples(ctor) if ctor is not None else [()]
        for args in tuples:
            for v in self._values(ctor):
                for u in self.config.users:
                    yield CreateContractTx(u, self.contract.name, tuple(args), v)

    def calls(self, functions) -> Iterator[ExecuteContract]:
        for f in functions:
            for args in self.interp.argument_tuples(f):
                for v in self._values(f):
                    for u in self.config.users:
                        yield ExecuteContract(u, self.config.main, self.contract.name, f.name, tuple(args), v)

    # search

    def _outcomes(self, cs, tx) -> Iterator[TxOutcome]:
        for out in apply_transaction(self.interp, cs, tx, Cursor()):
            self.states += 1
            if self.config.max_states is not None and self.states > self.config.max_states:
                raise _OutOfStates()
            if out.status == "budget":
                self.budget_hit = True
            yield out

    def _step(self, tx, out: TxOutcome) -> TraceStep:
        if out.status == "error":
            self._site = out.final.site
        log = tuple(out.final.log) if out.final is not None else ()
        return TraceStep(tx, tuple(out.choices), log, out.status)

    def _search(self, cs: ChainState, remaining: int) -> Optional[List[TraceStep]]:
        if remaining <= 0:
            return None
        if self.config.memoize:
            if self._seen.get(cs, 0) >= remaining:
                self.pruned += 1
                return None
            self._seen[cs] = remaining
        for tx in self.calls(self.contract.interface):
            for out in self._outcomes(cs, tx):
                if out.status == "error":
                    return [self._step(tx, out)]
                if out.committed:
                    found = self._search(self.between_calls(out.chain), remaining - 1)
                    if found is not None:
                        return [self._step(tx, out)] + found
        return None

    def roots(self) -> List[Any]:
        """First transactions of the search, in exploration order."""
        if self.config.kind == "contract":
            return list(self.deployments())
        return list(self.calls([self.function]))

    def _root(self, base: ChainState, tx) -> Optional[List[TraceStep]]:
        for out in self._outcomes(base, tx):
            if out.status == "error":
                return [self._step(tx, out)]
            if out.committed and self.config.kind == "contract":
                found = self._search(self.between_calls(out.chain), self.config.tx_bound)
                if found is not None:
                    return [self._step(tx, out)] + found
        return None

    def _explore(self, indices) -> Tuple[Optional[List[TraceStep]], bool]:
        base = self.base_state()
        roots = self.roots()
        try:
            for k in indices:
                found = self._root(base, roots[k])
                if found is not None:
                    return found, False
        except _OutOfStates:
            return None, True
        return None, False

    def _result(self, steps, exhausted: bool, t0: float) -> Trace:
        elapsed = int((_time.perf_counter() - t0) * 1000)
        stats = {"statesExplored": self.states, "pruned": self.pruned, "elapsedMs": elapsed}
        if steps is not None:
            return Trace(ERROR_FOUND, steps, self._site, stats)
        verdict = BUDGET_EXHAUSTED if (exhausted or self.budget_hit) else NO_VIOLATION
        return Trace(verdict, [], None, stats)

    def run(self) -> Trace:
        t0 = _time.perf_counter()
        steps, exhausted = self._explore(range(len(self.roots())))
        return self._result(steps, exhausted, t0)


def _run_root(program: A.Program, config: HarnessConfig, k: int):
    ex = Explorer(program, config)
    steps, exhausted = ex._explore([k])
    return steps, ex._site, ex.states, ex.pruned, ex.budget_hit, exhausted


def explore_parallel(program: A.Program, config: HarnessConfig, jobs: int) -> Trace:
    """Explore the first-transaction branches in worker processes.

    The search halts at the first error and memoisation only prunes states
    that were fully explored without one, so the earliest branch holding an
    error yields the same trace as the serial search.  Only the statistics
    differ.
    """
    from concurrent.futures import ProcessPoolExecutor

    t0 = _time.perf_counter()
    ex = Explorer(program, config)
    n = len(ex.roots())
    if jobs <= 1 or n <= 1:
        return ex.run()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_run_root, [program] * n, [config] * n, range(n)))
    for steps, site, states, pruned, budget_hit, exhausted in results:
        ex.states += states
        ex.pruned += pruned
        ex.budget_hit = ex.budget_hit or budget_hit or exhausted
    first = next((r for r in results if r[0] is not None), None)
    if first is not None:
        ex._site = first[1]
        return ex._result(first[0], False, t0)
    return ex._result(None, False, t0)


def explore(program: A.Program, config: HarnessConfig) -> Trace:
    return Explorer(program, config).run()


def replay(program: A.Program, config: HarnessConfig, trace: Trace, check_site: bool = True) -> TxOutcome:
    """Re-execute a trace with every choice pinned; returns the final outcome.

    Raises ReplayDivergence when the trace does not describe exactly one
    execution, or when it does not end in the recorded assertion violation.
    """
    if trace.verdict != ERROR_FOUND or not trace.steps:
        raise ReplayDivergence("only ErrorFound traces can be replayed")
    ex = Explorer(program, config)
    cs = ex.base_state()
    last: Optional[TxOutcome] = None
    for k, step in enumerate(trace.steps):
        if k > 0 and config.kind == "contract":
            cs = ex.between_calls(cs)
        cur = Cursor(step.choices)
        outs = list(apply_transaction(ex.interp, cs, step.tx, cur))
        if len(outs) != 1 or not cur.finished():
            raise ReplayDivergence(f"step {k} does not determine a unique execution", k)
        last = outs[0]
        final_step = k == len(trace.steps) - 1
        want = "error" if final_step else "committed"
        if last.status != want:
            raise ReplayDivergence(f"step {k} ended {last.status}, expected {want}", k)
        cs = last.chain
    assert last is not None
    if check_site and trace.site is not None and last.final.site != tuple(trace.site):
        raise ReplayDivergence(f"replay reached {last.final.site}, trace recorded {trace.site}")
    return last
