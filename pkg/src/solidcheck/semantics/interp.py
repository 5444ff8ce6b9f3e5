"""Small-step interpreter for explicated Solid programs.

``step`` is a generator over all successor states of one statement together
with the choices that select each of them.  Reads of havoc'd (UNKNOWN) basic
values are resolved lazily: evaluation raises ``NeedHavoc`` and the step is
retried once per value of the site's domain.  Each statement evaluates its
operands before it makes any choice, so retrying never repeats a choice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Any, Callable, Iterator, List, Optional, Sequence, Tuple

from pyrsistent import pmap

from .. import ast as A
from ..errors import ArityMismatch, InterpreterBug, UnallocatedRead
from ..typecheck import ProgramInfo
from ..types import (
    ADDRESS_MOD, UINT_MAX, AddressType, ArrayType, BoolType, ContractType, EnumType, IntType,
    MappingType, SolidType, StructType, UIntType, is_reference, wrap, wrap_int,
)
from .choices import CallTarget, Cursor, FreshAddress, HavocValue, SendOutcome, TransferOutcome
from .state import (
    BUDGET, ERROR, FAIL, SIMPLE, UNUSED, ExecState, RefMap, Terminal, alloc, child_type,
    default_value, fresh_address, init_s, memory_map, set_address, storage_map,
)
from .values import UNKNOWN, ArrayRecV, EnumV, Ref

Successors = Iterator[Tuple[Tuple, ExecState]]
UNSET = Ref("M", ("unset",))


class NeedHavoc(Exception):
    def __init__(self, site: Tuple):
        super().__init__(site)
        self.site = site


class EvalFail(Exception):
    """Evaluation aborts the transaction (bad index, division by zero, ...)."""


@dataclass
class SemanticsConfig:
    value_domain: Tuple[int, ...] = (0, 1, 2, UINT_MAX)
    address_universe: Tuple[int, ...] = (1, 2, 3, 4)
    step_budget: int = 10_000
    length_cap: int = 3
    max_call_depth: int = 32


def _prefixed(ch: Tuple, succ: Successors) -> Successors:
    for c2, st in succ:
        yield ch + c2, st


def outcome_of(st: ExecState) -> str:
    if st.c is FAIL:
        return "fail"
    if st.c is ERROR:
        return "error"
    if st.c is BUDGET:
        return "budget"
    return "complete"


class Interpreter:
    def __init__(self, program: A.Program, config: Optional[SemanticsConfig] = None,
                 call_handler: Optional[Callable] = None):
        self.program = program
        self.info = ProgramInfo.build(program)
        self.config = config or SemanticsConfig()
        self.call_handler = call_handler or default_call

    # -- domains ----------------------------------------------------------------

    def type_domain(self, t: SolidType) -> List[Any]:
        dom = self.config.value_domain
        if isinstance(t, UIntType):
            return list(dict.fromkeys(dom))
        if isinstance(t, IntType):
            return list(dict.fromkeys(wrap_int(v) for v in dom))
        if isinstance(t, BoolType):
            return [False, True]
        if isinstance(t, EnumType):
            return [EnumV(t.name, i) for i in range(len(self.info.enums[t.name].values))]
        if isinstance(t, (AddressType, ContractType)):
            return [0] + list(self.config.address_universe)
        raise InterpreterBug(f"no havoc domain for {t}")

    def length_domain(self) -> List[int]:
        vals = [v for v in dict.fromkeys(self.config.value_domain) if v <= self.config.length_cap]
        return vals or [0]

    def site_domain(self, st: ExecState, site: Tuple) -> List[Any]:
        if site[0] in ("time", "balance"):
            return list(dict.fromkeys(self.config.value_domain))
        _, owner, ref, comp = site
        t = self._refmap(st, ref, owner).type_of(ref)
        if not comp:
            return self.type_domain(t)
        if comp[0] == "len":
            return self.length_domain()
        if comp[0] == "field":
            return self.type_domain(child_type(self.info, t, comp[1]))
        return self.type_domain(child_type(self.info, t, comp[1]))

    def resolve(self, st: ExecState, site: Tuple, v: Any) -> ExecState:
        if site[0] == "time":
            return replace(st, time=v)
        if site[0] == "balance":
            a = site[1]
            return st.with_addr(a, replace(st.addr(a), balance=v))
        _, owner, ref, comp = site
        return self._write_leaf(st, ref, comp, v, owner)

    # -- reference cells ----------------------------------------------------------

    def _refmap(self, st: ExecState, ref: Ref, owner: Any = None) -> RefMap:
        if ref.space == "M":
            return memory_map(self.info, st.m)
        return storage_map(self.info, st.addr(st.this if owner is None else owner))

    def _owner(self, st: ExecState, ref: Ref) -> Any:
        return "M" if ref.space == "M" else st.this

    def read_leaf(self, st: ExecState, ref: Ref, comp: Tuple) -> Any:
        rm = self._refmap(st, ref)
        cell = rm.read(ref)
        if cell.type is None:
            raise UnallocatedRead(f"read of unallocated cell {ref!r}")
        v = _get_component(cell.value, comp, ref)
        if v is UNKNOWN:
            raise NeedHavoc(("cell", self._owner(st, ref), ref, comp))
        return v

    def _write_leaf(self, st: ExecState, ref: Ref, comp: Tuple, v: Any, owner: Any = None) -> ExecState:
        owner = self._owner(st, ref) if owner is None else owner
        rm = self._refmap(st, ref, owner)
        cell = rm.read(ref)
        if cell.type is None:
            raise UnallocatedRead(f"write to unallocated cell {ref!r}")
        new = replace(cell, value=_set_component(cell.value, comp, v, ref))
        cells = rm.write(ref, new)
        if ref.space == "M":
            return replace(st, m=cells)
        return st.with_addr(owner, replace(st.addr(owner), storage=cells))

    def balance(self, st: ExecState, a: int) -> int:
        b = st.addr(a).balance
        if b is UNKNOWN:
            raise NeedHavoc(("balance", a))
        return b

    def set_bal(self, st: ExecState, src: int, dest: int, v: int):
        """Balances after moving ``v`` from ``src`` to ``dest``; None when ``src`` cannot pay.

        Balances are unbounded naturals, so crediting never overflows and the
        total amount of currency is preserved exactly.
        """
        if v == 0:
            return st.s
        bs = self.balance(st, src)
        if bs < v:
            return None
        if src == dest:
            return st.s
        bd = self.balance(st, dest)
        s = set_address(st.s, src, replace(st.addr(src), balance=bs - v))
        return s.set(dest, replace(s.get(dest, st.addr(dest)), balance=bd + v))

    # -- expressions --------------------------------------------------------------

    def eval(self, st: ExecState, e: A.Expr) -> Any:
        if isinstance(e, A.IntLit):
            return e.value
        if isinstance(e, A.BoolLit):
            return e.value
        if isinstance(e, A.EnumLit):
            return EnumV(e.enum, self.info.enums[e.enum].values.index(e.member))
        if isinstance(e, A.Builtin):
            if e.name in ("msg.sender", "msg.value"):
                return st.l[e.name]
            if e.name == "tx.origin":
                return st.origin
            if st.time is UNKNOWN:
                raise NeedHavoc(("time",))
            return st.time
        if isinstance(e, A.Ident):
            if e.name in st.l:
                return st.l[e.name]
            ref = st.addr(st.this).members[e.name]
            if is_reference(e.ty):
                return ref
            return self.read_leaf(st, ref, ())
        if isinstance(e, A.Member):
            if e.name == "balance" and not isinstance(e.base.ty, StructType):
                return self.balance(st, self.eval(st, e.base))
            ref = self.eval(st, e.base)
            if isinstance(e.base.ty, ArrayType):
                return self.read_leaf(st, ref, ("len",))
            return self.read_leaf(st, ref, ("field", e.name))
        if isinstance(e, A.Index):
            ref, comp = self._index(st, e)
            return self.read_leaf(st, ref, comp)
        if isinstance(e, A.UnOp):
            v = self.eval(st, e.operand)
            if e.op == "!":
                return not v
            return wrap(e.ty, -v)
        if isinstance(e, A.BinOp):
            return self._binop(st, e)
        if isinstance(e, A.Convert):
            return self._convert(e.target, e.expr.ty, self.eval(st, e.expr))
        raise InterpreterBug(f"cannot evaluate {type(e).__name__}")

    def _index(self, st: ExecState, e: A.Index) -> Tuple[Ref, Tuple]:
        ref = self.eval(st, e.base)
        k = self.eval(st, e.index)
        if isinstance(e.base.ty, MappingType):
            return ref, ("key", k)
        n = self.read_leaf(st, ref, ("len",))
        if k >= n:
            raise EvalFail(f"index {k} out of bounds for length {n}")
        return ref, ("idx", k)

    def _binop(self, st: ExecState, e: A.BinOp) -> Any:
        op = e.op
        if op == "&&":
            return self.eval(st, e.left) and self.eval(st, e.right)
        if op == "||":
            return self.eval(st, e.left) or self.eval(st, e.right)
        a = self.eval(st, e.left)
        b = self.eval(st, e.right)
        if op == "==":
            return a == b
        if op == "!=":
            return a != b
        if op == "<":
            return a < b
        if op == ">":
            return a > b
        if op == "<=":
            return a <= b
        if op == ">=":
            return a >= b
        if op == "+":
            return wrap(e.ty, a + b)
        if op == "-":
            return wrap(e.ty, a - b)
        if op == "*":
            return wrap(e.ty, a * b)
        if b == 0:
            raise EvalFail("division by zero")
        if isinstance(e.ty, IntType):
            q = abs(a) // abs(b)
            q = q if (a >= 0) == (b >= 0) else -q
            return wrap(e.ty, q) if op == "/" else wrap(e.ty, a - b * q)
        return a // b if op == "/" else a % b

    def _convert(self, target: SolidType, source: SolidType, v: Any) -> Any:
        if isinstance(v, EnumV):
            v = v.index
        if isinstance(target, UIntType) or isinstance(target, IntType):
            return wrap(target, v)
        if isinstance(target, AddressType):
            return v % ADDRESS_MOD
        return v

    # -- locations ----------------------------------------------------------------

    def locate(self, st: ExecState, e: A.Expr) -> Tuple:
        if isinstance(e, A.Ident):
            if e.name in st.l:
                return ("local", e.name)
            if is_reference(e.ty):
                raise InterpreterBug(f"assignment to storage reference {e.name} was not explicated")
            return ("leaf", st.addr(st.this).members[e.name], ())
        if isinstance(e, A.Member):
            ref = self.eval(st, e.base)
            if isinstance(e.base.ty, ArrayType):
                return ("leaf", ref, ("len",))
            return ("leaf", ref, ("field", e.name))
        if isinstance(e, A.Index):
            ref, comp = self._index(st, e)
            return ("leaf", ref, comp)
        raise InterpreterBug(f"not an lvalue: {type(e).__name__}")

    def store(self, st: ExecState, loc: Tuple, v: Any) -> ExecState:
        if loc[0] == "local":
            return replace(st, l=st.l.set(loc[1], v))
        _, ref, comp = loc
        if ref.space == "S" and isinstance(v, Ref):
            raise InterpreterBug("reference assignment into storage was not explicated")
        return self._write_leaf(st, ref, comp, v)

    def update(self, st: ExecState, lhs: Sequence[Optional[A.Expr]], values: Sequence[Any]) -> ExecState:
        locs = [None if x is None else self.locate(st, x) for x in lhs]
        for loc, v in zip(locs, values):
            if loc is not None:
                st = self.store(st, loc, v)
        return st

    # -- choice plumbing ----------------------------------------------------------

    def phase(self, st: ExecState, fn: Callable[[ExecState], Any], cur: Cursor):
        """Yield (choices, resolved state, fn result); EvalFail yields the FAIL marker."""
        try:
            r = fn(st)
        except NeedHavoc as h:
            options = [HavocValue(h.site, v) for v in self.site_domain(st, h.site)]
            for o in cur.pick(options):
                for ch, st2, r2 in self.phase(self.resolve(st, h.site, o.value), fn, cur):
                    yield (o,) + ch, st2, r2
            return
        except EvalFail:
            r = FAIL
        yield (), st, r

    def _simple(self, st: ExecState, fn: Callable[[ExecState], Any], cur: Cursor) -> Successors:
        for ch, st1, r in self.phase(st, fn, cur):
            if isinstance(r, Terminal):
                yield ch, replace(st1, c=r)
            else:
                yield ch, r

    # -- execution ----------------------------------------------------------------

    def run(self, st: ExecState, cur: Cursor) -> Successors:
        """All terminal states reachable from ``st`` (depth first)."""
        stack = [((), st)]
        budget = self.config.step_budget
        while stack:
            ch, s = stack.pop()
            if s.terminal:
                yield ch, s
                continue
            if s.steps >= budget:
                yield ch, replace(s, c=BUDGET)
                continue
            succ = list(self.step(s, cur))
            for c2, s2 in reversed(succ):
                stack.append((ch + c2, s2))

    def step(self, st: ExecState, cur: Cursor) -> Successors:
        stmt = st.c[0]
        rest = st.c[1:]
        st = replace(st, steps=st.steps + 1)
        handler = getattr(self, "_exec_" + type(stmt).__name__, None)
        if handler is None:
            raise InterpreterBug(f"no rule for {type(stmt).__name__}")
        yield from handler(st, stmt, rest, cur)

    def _exec_VarDecl(self, st, s, rest, cur):
        yield (), replace(st, c=rest)

    def _exec_While(self, st, s, rest, cur):
        def fn(x):
            if self.eval(x, s.cond):
                return replace(x, c=tuple(s.body) + (s,) + rest)
            return replace(x, c=rest)
        yield from self._simple(st, fn, cur)

    def _exec_If(self, st, s, rest, cur):
        def fn(x):
            branch = s.then if self.eval(x, s.cond) else s.orelse
            return replace(x, c=tuple(branch) + rest)
        yield from self._simple(st, fn, cur)

    def _exec_Assign(self, st, s, rest, cur):
        def fn(x):
            v = self.eval(x, s.rhs)
            return replace(self.store(x, self.locate(x, s.lhs), v), c=rest)
        yield from self._simple(st, fn, cur)

    def _exec_AllocMemory(self, st, s, rest, cur):
        def fn(x):
            size = None if s.size is None else self.eval(x, s.size)
            loc = self.locate(x, s.lhs)
            ref = Ref("M", (x.next_alloc,))
            x2 = replace(x, m=alloc(self.info, x.m, ref, s.type), next_alloc=x.next_alloc + 1)
            if size is not None:
                x2 = self._write_leaf(x2, ref, ("len",), size)
            return replace(self.store(x2, loc, ref), c=rest)
        yield from self._simple(st, fn, cur)

    def _exec_Push(self, st, s, rest, cur):
        def fn(x):
            v = self.eval(x, s.value)
            ref = self.eval(x, s.array)
            n = self.read_leaf(x, ref, ("len",))
            x = self._write_leaf(x, ref, ("len",), n + 1)
            return replace(self._write_leaf(x, ref, ("idx", n), v), c=rest)
        yield from self._simple(st, fn, cur)

    def _exec_Revert(self, st, s, rest, cur):
        yield (), replace(st, c=FAIL)

    def _exec_Require(self, st, s, rest, cur):
        yield from self._simple(st, lambda x: replace(x, c=rest) if self.eval(x, s.cond) else FAIL, cur)

    _exec_VAssume = _exec_Require

    def _exec_VAssert(self, st, s, rest, cur):
        def fn(x):
            if self.eval(x, s.cond):
                return replace(x, c=rest)
            return replace(x, c=ERROR, site=self.site_of(x, s))
        yield from self._simple(st, fn, cur)

    def site_of(self, st: ExecState, s: A.Stmt) -> Tuple:
        fname = st.function.name if st.function is not None else None
        line = s.span.line if s.span is not None else None
        return (st.addr(st.this).type, fname, line)

    def _exec_CexPrint(self, st, s, rest, cur):
        def fn(x):
            line = s.span.line if s.span is not None else None
            return replace(x, log=x.log + ((s.name, self.eval(x, s.arg), line),), c=rest)
        yield from self._simple(st, fn, cur)

    def _exec_Return(self, st, s, rest, cur):
        def fn(x):
            vals = [self.eval(x, e) for e in s.exprs]
            l = x.l
            for r, v in zip(x.function.returns, vals):
                l = l.set(r.name, v)
            return replace(x, l=l, c=())
        yield from self._simple(st, fn, cur)

    def _exec_Transfer(self, st, s, rest, cur):
        def prep(x):
            src = self.eval(x, s.source)
            dest = self.eval(x, s.dest)
            v = self.eval(x, s.value)
            kind = x.addr(dest).type
            if kind == UNUSED:
                return FAIL
            return kind, self.set_bal(x, src, dest, v)
        for ch, st1, r in self.phase(st, prep, cur):
            if isinstance(r, Terminal) or r[1] is None:
                yield ch, replace(st1, c=FAIL)
                continue
            kind, moved = r
            if kind == SIMPLE:
                yield ch, replace(st1, s=moved, c=rest)
                continue
            for o in cur.pick([TransferOutcome(True), TransferOutcome(False)]):
                if o.ok:
                    yield ch + (o,), replace(st1, s=moved, c=rest)
                else:
                    yield ch + (o,), replace(st1, c=FAIL)

    def _exec_Send(self, st, s, rest, cur):
        def prep(x):
            src = self.eval(x, s.source)
            dest = self.eval(x, s.dest)
            v = self.eval(x, s.value)
            kind = x.addr(dest).type
            if kind == UNUSED:
                return FAIL
            return kind, self.set_bal(x, src, dest, v)
        for ch, st1, r in self.phase(st, prep, cur):
            if isinstance(r, Terminal):
                yield ch, replace(st1, c=FAIL)
                continue
            kind, moved = r
            if kind == SIMPLE:
                outcomes = [(None, moved is not None)]
            else:
                opts = ([SendOutcome(True)] if moved is not None else []) + [SendOutcome(False)]
                outcomes = [(o, o.ok) for o in cur.pick(opts)]
            for o, ok in outcomes:
                ch2 = ch + ((o,) if o is not None else ())
                base = replace(st1, s=moved) if ok else st1
                yield from _prefixed(ch2, self.finish(base, [s.lhs], [ok], rest, cur))

    def _exec_Call(self, st, s, rest, cur):
        def prep(x):
            addr = self.eval(x, s.address)
            v = self.eval(x, s.value)
            if x.addr(addr).type == UNUSED:
                return FAIL
            return addr, v, self.set_bal(x, x.this, addr, v)
        for ch, st1, r in self.phase(st, prep, cur):
            if isinstance(r, Terminal):
                yield ch, replace(st1, c=FAIL)
                continue
            addr, v, moved = r
            yield from _prefixed(ch, self.call_handler(self, st1, s, rest, addr, v, moved, cur))

    def finish(self, st: ExecState, lhs: Sequence[Optional[A.Expr]], values: Sequence[Any], rest: Tuple,
               cur: Cursor) -> Successors:
        """Store call results into ``lhs`` and continue with ``rest``."""
        if all(x is None for x in lhs):
            yield (), replace(st, c=rest)
            return
        yield from self._simple(st, lambda x: replace(self.update(x, lhs, values), c=rest), cur)

    def enter(self, st: ExecState, f: A.Function, args: Sequence[Any], this: int, sender: int,
              value: int) -> ExecState:
        """Callee state: fresh locals, same blockchain and memory."""
        if len(args) != len(f.params):
            raise ArityMismatch(f"{f.name} expects {len(f.params)} arguments, got {len(args)}")
        l = {"this": this, "msg.sender": sender, "msg.value": value}
        m, nxt = st.m, st.next_alloc
        for p, a in zip(f.params, args):
            if a is None and is_reference(p.type):
                a = Ref("M", (nxt,))
                m = alloc(self.info, m, a, p.type)
                nxt += 1
            l[p.name] = a
        for v in f.returns + A.declared_locals(f):
            l[v.name] = UNSET if is_reference(v.type) else default_value(self.info, v.type)
        return replace(st, m=m, next_alloc=nxt, l=pmap(l), c=tuple(f.body), function=f, depth=st.depth + 1)

    def returned(self, caller: ExecState, callee: ExecState) -> ExecState:
        """Caller state after a callee terminated (blockchain, memory and counters carried over)."""
        return replace(caller, s=callee.s, m=callee.m, steps=callee.steps, next_alloc=callee.next_alloc,
                       log=callee.log, time=callee.time, site=callee.site)

    def _exec_ContractCall(self, st, s, rest, cur):
        f = self.info.contracts[s.contract].function(s.func)

        def prep(x):
            args = tuple(self.eval(x, a) for a in s.args)
            v = 0 if s.value is None else self.eval(x, s.value)
            if s.target is None:
                return x.this, args, v, x.s, True
            a = self.eval(x, s.target)
            if x.addr(a).type != s.contract:
                return FAIL
            moved = self.set_bal(x, x.this, a, v)
            if moved is None:
                return FAIL
            return a, args, v, moved, False

        for ch, st1, r in self.phase(st, prep, cur):
            if isinstance(r, Terminal):
                yield ch, replace(st1, c=FAIL)
                continue
            if st1.depth >= self.config.max_call_depth:
                yield ch, replace(st1, c=BUDGET)
                continue
            a, args, v, moved, internal = r
            sender = st1.l["msg.sender"] if internal else st1.this
            value = st1.l["msg.value"] if internal else v
            callee = self.enter(replace(st1, s=moved), f, args, a, sender, value)
            for ch2, t in self.run(callee, cur):
                back = self.returned(st1, t)
                if isinstance(t.c, Terminal):
                    yield ch + ch2, replace(back, c=t.c)
                    continue
                outs = [t.l[o.name] for o in f.returns]
                yield from _prefixed(ch + ch2, self.finish(back, s.lhs, outs, rest, cur))

    def _exec_CreateContract(self, st, s, rest, cur):
        ctor = self.info.contracts[s.contract].constructor

        def prep(x):
            args = tuple(self.eval(x, a) for a in s.args)
            v = 0 if s.value is None else self.eval(x, s.value)
            addr = fresh_address(x.s, self.config.address_universe)
            if addr is None:
                return FAIL
            x1 = replace(x, s=init_s(self.info, x.s, addr, s.contract))
            moved = self.set_bal(x1, x.this, addr, v)
            if moved is None:
                return FAIL
            return addr, args, v, moved

        for ch, st1, r in self.phase(st, prep, cur):
            if isinstance(r, Terminal):
                yield ch, replace(st1, c=FAIL)
                continue
            if st1.depth >= self.config.max_call_depth:
                yield ch, replace(st1, c=BUDGET)
                continue
            addr, args, v, moved = r
            for o in cur.pick([FreshAddress(addr)]):
                callee = self.enter(replace(st1, s=moved), ctor, args, addr, st1.this, v)
                for ch2, t in self.run(callee, cur):
                    back = self.returned(st1, t)
                    if isinstance(t.c, Terminal):
                        yield ch + (o,) + ch2, replace(back, c=t.c)
                        continue
                    lhs = [s.lhs] if s.lhs is not None else []
                    yield from _prefixed(ch + (o,) + ch2, self.finish(back, lhs, [addr], rest, cur))

    # -- interface-level helpers ----------------------------------------------------

    def argument_domains(self, f: A.Function) -> List[List[Any]]:
        """Per-parameter domains; reference-typed parameters get a default value (None)."""
        return [[None] if is_reference(p.type) else self.type_domain(p.type) for p in f.params]

    def argument_tuples(self, f: A.Function) -> Iterator[Tuple[Any, ...]]:
        return itertools.product(*self.argument_domains(f))


def default_call(interp: Interpreter, st: ExecState, s: A.Call, rest: Tuple, addr: int, value: int,
                 moved, cur: Cursor) -> Successors:
    """Low-level call: plain transfer to simple addresses, any interface function of a contract."""
    kind = st.addr(addr).type
    if moved is None:
        yield from interp.finish(st, [s.lhs], [False], rest, cur)
        return
    if kind == SIMPLE:
        yield from interp.finish(replace(st, s=moved), [s.lhs], [True], rest, cur)
        return
    contract = interp.info.contracts[kind]
    options = [CallTarget(f.name, args) for f in contract.interface for args in interp.argument_tuples(f)]
    for o in cur.pick(options):
        f = contract.function(o.function)
        if st.depth >= interp.config.max_call_depth:
            yield (o,), replace(st, c=BUDGET)
            continue
        callee = interp.enter(replace(st, s=moved), f, o.args, addr, st.this, value)
        for ch, t in interp.run(callee, cur):
            if t.c is FAIL:
                back = replace(st, steps=t.steps, time=t.time)
                yield from _prefixed((o,) + ch, interp.finish(back, [s.lhs], [False], rest, cur))
            elif isinstance(t.c, Terminal):
                yield (o,) + ch, replace(interp.returned(st, t), c=t.c)
            else:
                back = interp.returned(st, t)
                yield from _prefixed((o,) + ch, interp.finish(back, [s.lhs], [True], rest, cur))


# -- value components -------------------------------------------------------------


def _get_component(v: Any, comp: Tuple, ref: Ref) -> Any:
    if not comp:
        return v
    kind = comp[0]
    if kind == "field":
        return v.get(comp[1])
    if kind == "len":
        return v.length
    return v.get(comp[1], ref)


def _set_component(v: Any, comp: Tuple, x: Any, ref: Ref) -> Any:
    if not comp:
        return x
    kind = comp[0]
    if kind == "field":
        return v.set(comp[1], x)
    if kind == "len":
        return ArrayRecV(x, v.data)
    return v.set(comp[1], x, ref)
