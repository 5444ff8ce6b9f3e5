"""Naive brute-force verdict oracle for generated programs.

Works directly on the type-checked (not explicated) AST of a single-contract
program drawn from ``gen.random_program(effects=False)``: its own evaluator
gives Solidity meaning to pushes, out-of-range indexes, division by zero and
non-payable value checks, independently of the explicator, the interpreter and
the explorer.  It enumerates every deployment followed by every sequence of at
most ``bound`` interface calls, with senders, arguments and values drawn from
the same finite domains the explorer uses, and reports whether any sequence
reaches a failed assertion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from solidcheck import ast as A
from solidcheck.types import AddressType, BoolType, UINT_MOD

ERROR_FOUND = "ErrorFound"
NO_VIOLATION = "NoViolationWithinBound"


class Revert(Exception):
    pass


class Violation(Exception):
    pass


@dataclass(frozen=True)
class World:
    a: int = 0
    b: int = 0
    f: bool = False
    bal: Tuple[Tuple[int, int], ...] = ()
    xs: Tuple[int, ...] = ()
    balance: int = 0


class Frame:
    def __init__(self, world: World, this: int, sender: int, value: int, params: Dict[str, object]):
        self.vars = {"a": world.a, "b": world.b, "f": world.f}
        self.bal = dict(world.bal)
        self.xs = list(world.xs)
        self.balance = world.balance
        self.this = this
        self.sender = sender
        self.value = value
        self.params = dict(params)

    def world(self) -> World:
        bal = tuple(sorted((k, v) for k, v in self.bal.items() if v != 0))
        return World(self.vars["a"], self.vars["b"], self.vars["f"], bal, tuple(self.xs), self.balance)

    # expressions

    def eval(self, e: A.Expr):
        if isinstance(e, A.IntLit):
            return e.value
        if isinstance(e, A.BoolLit):
            return e.value
        if isinstance(e, A.Builtin):
            return {"msg.sender": self.sender, "msg.value": self.value}[e.name]
        if isinstance(e, A.Ident):
            if e.name == "this":
                return self.this
            if e.name in self.params:
                return self.params[e.name]
            return self.vars[e.name]
        if isinstance(e, A.Convert):
            return self.eval(e.expr)
        if isinstance(e, A.Member):
            if e.name == "balance":
                assert self.eval(e.base) == self.this
                return self.balance
            assert e.name == "length"
            return len(self.xs)
        if isinstance(e, A.Index):
            k = self.eval(e.index)
            if e.base.name == "bal":
                return self.bal.get(k, 0)
            if k >= len(self.xs):
                raise Revert()
            return self.xs[k]
        if isinstance(e, A.UnOp):
            assert e.op == "!"
            return not self.eval(e.operand)
        if isinstance(e, A.BinOp):
            if e.op == "&&":
                return self.eval(e.left) and self.eval(e.right)
            if e.op == "||":
                return self.eval(e.left) or self.eval(e.right)
            x, y = self.eval(e.left), self.eval(e.right)
            ops = {
                "==": lambda: x == y, "!=": lambda: x != y, "<": lambda: x < y, "<=": lambda: x <= y,
                ">": lambda: x > y, ">=": lambda: x >= y,
                "+": lambda: (x + y) % UINT_MOD, "-": lambda: (x - y) % UINT_MOD,
                "*": lambda: (x * y) % UINT_MOD,
            }
            if e.op in ops:
                return ops[e.op]()
            if y == 0:
                raise Revert()
            return x // y if e.op == "/" else x % y
        raise NotImplementedError(type(e).__name__)

    # statements

    def run(self, body: Sequence[A.Stmt]) -> None:
        for s in body:
            self.exec(s)

    def exec(self, s: A.Stmt) -> None:
        if isinstance(s, A.Assign):
            v = self.eval(s.rhs)
            lhs = s.lhs
            if isinstance(lhs, A.Ident):
                self.vars[lhs.name] = v
            elif lhs.base.name == "bal":
                self.bal[self.eval(lhs.index)] = v
            else:
                k = self.eval(lhs.index)
                if k >= len(self.xs):
                    raise Revert()
                self.xs[k] = v
        elif isinstance(s, A.Push):
            self.xs.append(self.eval(s.value))
        elif isinstance(s, A.Require):
            if not self.eval(s.cond):
                raise Revert()
        elif isinstance(s, A.VAssert):
            if not self.eval(s.cond):
                raise Violation()
        elif isinstance(s, A.If):
            self.run(s.then if self.eval(s.cond) else s.orelse)
        elif isinstance(s, A.Transfer):
            assert self.eval(s.source) == self.this
            self.eval(s.dest)
            v = self.eval(s.value)
            if v > self.balance:
                raise Revert()
            self.balance -= v
        elif isinstance(s, A.Revert):
            raise Revert()
        else:
            raise NotImplementedError(type(s).__name__)


class Oracle:
    def __init__(self, program: A.Program, domain=(0, 1), universe=(1, 2, 3, 4)):
        (self.contract,) = program.contracts
        self.domain = tuple(dict.fromkeys(domain))
        self.main = universe[0]
        self.users = tuple(universe[1:-1])
        self.addresses = (0,) + tuple(universe)
        self.memo: Dict[Tuple[World, int], bool] = {}

    def _arg_domain(self, p: A.LocalVar):
        if isinstance(p.type, BoolType):
            return (False, True)
        if isinstance(p.type, AddressType):
            return self.addresses
        return self.domain

    def _calls(self, f: A.Function):
        values = self.domain if f.payable else (0,)
        for args in itertools.product(*(self._arg_domain(p) for p in f.params)):
            for v in values:
                for u in self.users:
                    yield args, v, u

    def execute(self, world: World, f: A.Function, args, value: int, sender: int) -> Optional[World]:
        """Post-world, or None on revert; raises Violation on a failed assertion."""
        if value and not f.payable:
            return None
        fr = Frame(world, self.main, sender, value, {p.name: a for p, a in zip(f.params, args)})
        fr.balance += value
        try:
            fr.run(f.body)
        except Revert:
            return None
        return fr.world()

    def _reachable(self, world: World, remaining: int) -> bool:
        if remaining == 0:
            return False
        key = (world, remaining)
        if key in self.memo:
            return self.memo[key]
        found = False
        for f in self.contract.interface:
            for args, v, u in self._calls(f):
                try:
                    nxt = self.execute(world, f, args, v, u)
                except Violation:
                    found = True
                    break
                if nxt is not None and self._reachable(nxt, remaining - 1):
                    found = True
                    break
            if found:
                break
        self.memo[key] = found
        return found

    def verdict(self, bound: int) -> str:
        ctor = self.contract.constructor
        for args, v, u in self._calls(ctor):
            try:
                world = self.execute(World(), ctor, args, v, u)
            except Violation:
                return ERROR_FOUND
            if world is not None and self._reachable(world, bound):
                return ERROR_FOUND
        return NO_VIOLATION


def oracle_verdict(program: A.Program, bound: int, domain=(0, 1), universe=(1, 2, 3, 4)) -> str:
    return Oracle(program, domain, universe).verdict(bound)
