"""Explication: rewrite implicit Solidity behaviour into plain Solid statements.

Each pass rewrites statement lists and reports whether it changed anything;
the driver re-annotates the program after every pass and iterates until no
pass applies.  Generated temporaries use the reserved ``__`` prefix and a
per-invocation counter, so the output is deterministic.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from . import ast as A
from .typecheck import ProgramInfo, retype
from .types import (
    ADDRESS, UINT, AddressType, ArrayType, BoolType, ContractType, CopyKind, EnumType, IntType,
    LocationKind, MappingType, SolidType, StructType, UIntType, classify_copy, is_reference,
)

CHECKED = "checked"  # preconditions already inserted before this statement
GUARD = "guard"  # an inserted precondition
INIT = "init"  # an inserted default initialiser
VALUE_CHECK = "value"  # the non-payable msg.value check
MAX_ROUNDS = 64


@dataclass
class ExplicateOptions:
    # non-payable constructors reject value just like non-payable interface functions
    check_constructor_value: bool = True
    division_guards: bool = True


def zero_expr(info: ProgramInfo, t: SolidType) -> A.Expr:
    if isinstance(t, (UIntType, IntType)):
        return A.IntLit(0)
    if isinstance(t, BoolType):
        return A.BoolLit(False)
    if isinstance(t, AddressType):
        return A.Convert(ADDRESS, A.IntLit(0))
    if isinstance(t, ContractType):
        return A.Convert(t, A.Convert(ADDRESS, A.IntLit(0)))
    if isinstance(t, EnumType):
        return A.EnumLit(t.name, info.enums[t.name].values[0])
    raise ValueError(f"{t} has no literal default")


def _length(e: A.Expr) -> A.Member:
    return A.Member(copy.deepcopy(e), "length")


def _inc(name: str) -> A.Assign:
    return A.Assign(A.Ident(name), A.BinOp("+", A.Ident(name), A.IntLit(1)))


def _has_index(e: A.Expr) -> bool:
    return any(isinstance(x, A.Index) for x in A.sub_expressions(e))


def _with_span(stmts: List[A.Stmt], span) -> List[A.Stmt]:
    for s in A.walk_statements(stmts):
        if s.span is None:
            s.span = span
    return stmts


@dataclass
class Explicator:
    info: ProgramInfo
    options: ExplicateOptions = field(default_factory=ExplicateOptions)
    counter: int = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"__{base}{self.counter}"

    # -- traversal --------------------------------------------------------------

    def rewrite(self, p: A.Program, fn: Callable[[A.Function, A.Stmt], Optional[List[A.Stmt]]]) -> bool:
        changed = False
        for c in p.contracts:
            for f in c.functions:
                f.body, ch = self._rewrite_block(f, f.body, fn)
                changed = changed or ch
        return changed

    def _rewrite_block(self, f, body, fn) -> Tuple[List[A.Stmt], bool]:
        out: List[A.Stmt] = []
        changed = False
        for s in body:
            if isinstance(s, A.While):
                s.body, ch = self._rewrite_block(f, s.body, fn)
                changed = changed or ch
            elif isinstance(s, A.If):
                s.then, ch1 = self._rewrite_block(f, s.then, fn)
                s.orelse, ch2 = self._rewrite_block(f, s.orelse, fn)
                changed = changed or ch1 or ch2
            r = fn(f, s)
            if r is None:
                out.append(s)
            else:
                out.extend(_with_span(r, s.span))
                changed = True
        return out, changed

    # -- resize -----------------------------------------------------------------

    def reset(self, elem: A.Expr, t: SolidType) -> List[A.Stmt]:
        """Statements restoring ``elem`` (of type ``t``) to its default value."""
        if isinstance(t, MappingType):
            return []
        if isinstance(t, StructType):
            out: List[A.Stmt] = []
            for m in self.info.struct_members(t):
                out += self.reset(A.Member(copy.deepcopy(elem), m.name), m.type)
            return out
        if isinstance(t, ArrayType):
            if t.size is None:
                return [A.Assign(_length(elem), A.IntLit(0))]
            out = []
            for j in range(t.size):
                out += self.reset(A.Index(copy.deepcopy(elem), A.IntLit(j)), t.elem)
            return out
        return [A.Assign(copy.deepcopy(elem), zero_expr(self.info, t))]

    def explicate_resize(self, s: A.Assign) -> List[A.Stmt]:
        array = s.lhs.base
        elem_t = array.ty.elem
        pre: List[A.Stmt] = []
        size = s.rhs
        if _has_index(size):
            n = self.fresh("n")
            pre = [A.VarDecl(A.LocalVar(n, UINT)), A.Assign(A.Ident(n), size)]
            size = A.Ident(n)
        i = self.fresh("i")
        loop = A.While(A.BinOp("<", A.Ident(i), _length(array)),
                       self.reset(A.Index(copy.deepcopy(array), A.Ident(i)), elem_t) + [_inc(i)])
        shrink = A.If(A.BinOp(">", _length(array), copy.deepcopy(size)),
                      [A.VarDecl(A.LocalVar(i, UINT)), A.Assign(A.Ident(i), copy.deepcopy(size)), loop])
        return pre + [shrink, A.Assign(_length(array), copy.deepcopy(size), plain=True)]

    def _resize(self, f, s):
        if (isinstance(s, A.Assign) and not s.plain and isinstance(s.lhs, A.Member) and s.lhs.name == "length"
                and isinstance(s.lhs.base.ty, ArrayType)):
            return self.explicate_resize(s)
        return None

    # -- deep copies --------------------------------------------------------------

    def explicate_deep_copy(self, s: A.Assign) -> List[A.Stmt]:
        lhs, rhs = s.lhs, s.rhs
        t = lhs.ty
        out: List[A.Stmt] = []
        if lhs.loc is LocationKind.MEMORY_POINTER:
            size = A.IntLit(0) if isinstance(t, ArrayType) and t.size is None else None
            out.append(A.AllocMemory(copy.deepcopy(lhs), t, size))
        if isinstance(t, StructType):
            for m in self.info.struct_members(t):
                if isinstance(m.type, MappingType):
                    continue
                out.append(A.Assign(A.Member(copy.deepcopy(lhs), m.name), A.Member(copy.deepcopy(rhs), m.name)))
        elif isinstance(t, ArrayType) and t.size is not None:
            for j in range(t.size):
                out.append(A.Assign(A.Index(copy.deepcopy(lhs), A.IntLit(j)),
                                    A.Index(copy.deepcopy(rhs), A.IntLit(j))))
        elif isinstance(t, ArrayType):
            i = self.fresh("i")
            out += [
                A.Assign(_length(lhs), _length(rhs)),
                A.VarDecl(A.LocalVar(i, UINT)),
                A.Assign(A.Ident(i), A.IntLit(0)),
                A.While(A.BinOp("<", A.Ident(i), _length(lhs)),
                        [A.Assign(A.Index(copy.deepcopy(lhs), A.Ident(i)), A.Index(copy.deepcopy(rhs), A.Ident(i))),
                         _inc(i)]),
            ]
        return out

    def _deep_copy(self, f, s):
        if isinstance(s, A.Assign) and is_reference(s.lhs.ty) and s.lhs.loc is not None and s.rhs.loc is not None:
            if classify_copy(s.lhs.loc, s.rhs.loc) is CopyKind.DEEP_COPY:
                return self.explicate_deep_copy(s)
        if isinstance(s, A.AllocMemory) and s.lhs.loc is not None and s.lhs.loc.in_storage:
            tmp = self.fresh("tmp")
            return [A.VarDecl(A.LocalVar(tmp, s.type, "memory")),
                    A.AllocMemory(A.Ident(tmp), s.type, s.size),
                    A.Assign(s.lhs, A.Ident(tmp))]
        return None

    # -- argument and result temporaries -------------------------------------------

    def _temp(self, t: SolidType, location: str) -> Tuple[str, A.VarDecl]:
        name = self.fresh("tmp")
        return name, A.VarDecl(A.LocalVar(name, t, location))

    def _arguments(self, f, s):
        if isinstance(s, (A.ContractCall, A.CreateContract)):
            if isinstance(s, A.ContractCall):
                callee = self.info.contracts[s.contract].function(s.func)
            else:
                callee = self.info.contracts[s.contract].constructor
            pre: List[A.Stmt] = []
            post: List[A.Stmt] = []
            for k, (a, p) in enumerate(zip(s.args, callee.params)):
                if is_reference(p.type) and classify_copy(p.kind, a.loc) is CopyKind.DEEP_COPY:
                    name, decl = self._temp(p.type, p.location or "memory")
                    pre += [decl, A.Assign(A.Ident(name), a)]
                    s.args[k] = A.Ident(name)
            if isinstance(s, A.ContractCall):
                for k, (x, r) in enumerate(zip(s.lhs, callee.returns)):
                    if x is not None and is_reference(r.type) and classify_copy(x.loc, r.kind) is CopyKind.DEEP_COPY:
                        name, decl = self._temp(r.type, r.location or "memory")
                        pre.append(decl)
                        post.append(A.Assign(x, A.Ident(name)))
                        s.lhs[k] = A.Ident(name)
            if pre or post:
                return pre + [s] + post
            return None
        if isinstance(s, A.Return):
            pre = []
            for k, (e, o) in enumerate(zip(s.exprs, f.returns)):
                if is_reference(o.type) and classify_copy(o.kind, e.loc) is CopyKind.DEEP_COPY:
                    name, decl = self._temp(o.type, o.location or "memory")
                    pre += [decl, A.Assign(A.Ident(name), e)]
                    s.exprs[k] = A.Ident(name)
            return pre + [s] if pre else None
        return None

    # -- push ---------------------------------------------------------------------

    def explicate_push(self, s: A.Push) -> List[A.Stmt]:
        arr = s.array
        pre: List[A.Stmt] = []
        value = s.value
        if not is_reference(value.ty) and any(
                isinstance(x, A.Index) or (isinstance(x, A.Member) and x.name == "length")
                for x in A.sub_expressions(value)):
            v = self.fresh("v")
            pre = [A.VarDecl(A.LocalVar(v, value.ty)), A.Assign(A.Ident(v), value)]
            value = A.Ident(v)
        grow = A.Assign(_length(arr), A.BinOp("+", _length(arr), A.IntLit(1)), plain=True)
        slot = A.Index(copy.deepcopy(arr), A.BinOp("-", _length(arr), A.IntLit(1)))
        return pre + [grow, A.Assign(slot, value)]

    def _push(self, f, s):
        return self.explicate_push(s) if isinstance(s, A.Push) else None

    # -- preconditions ----------------------------------------------------------------

    def checks(self, e: A.Expr, escapes: Tuple[A.Expr, ...] = ()) -> List[A.Expr]:
        """Guard conditions for ``e`` in evaluation order, weakened by short-circuit context."""
        out: List[A.Expr] = []

        def guard(cond: A.Expr) -> A.Expr:
            g = cond
            for esc in reversed(escapes):
                g = A.BinOp("||", copy.deepcopy(esc), g)
            return g

        if isinstance(e, A.BinOp) and e.op in ("&&", "||"):
            out += self.checks(e.left, escapes)
            esc = A.UnOp("!", e.left) if e.op == "&&" else e.left
            out += self.checks(e.right, escapes + (esc,))
            return out
        if isinstance(e, A.Member):
            return self.checks(e.base, escapes)
        if isinstance(e, A.Index):
            out += self.checks(e.base, escapes) + self.checks(e.index, escapes)
            if isinstance(e.base.ty, ArrayType):
                out.append(guard(A.BinOp("<", copy.deepcopy(e.index), _length(e.base))))
            return out
        if isinstance(e, A.BinOp):
            out += self.checks(e.left, escapes) + self.checks(e.right, escapes)
            if e.op in ("/", "%") and self.options.division_guards:
                out.append(guard(A.BinOp("!=", copy.deepcopy(e.right), A.IntLit(0))))
            return out
        if isinstance(e, A.UnOp):
            return self.checks(e.operand, escapes)
        if isinstance(e, A.Convert):
            return self.checks(e.expr, escapes)
        return out

    def _requires(self, exprs: List[A.Expr]) -> List[A.Stmt]:
        out = []
        for e in exprs:
            for g in self.checks(e):
                out.append(A.Require(g, tags=frozenset({GUARD})))
        return out

    def _preconditions(self, f, s):
        if CHECKED in s.tags or GUARD in s.tags:
            return None
        s.tags = s.tags | {CHECKED}
        if isinstance(s, A.While):
            reqs = self._requires([s.cond])
            if not reqs:
                return None
            s.body = s.body + copy.deepcopy(reqs)
            return reqs + [s]
        reqs = self._requires(A.statement_expressions(s))
        return reqs + [s] if reqs else None

    # -- function prologues -------------------------------------------------------------

    def default_init(self, name: str, v: A.LocalVar) -> List[A.Stmt]:
        if v.location == "storage":
            return []
        t = v.type
        if is_reference(t):
            size = A.IntLit(0) if isinstance(t, ArrayType) and t.size is None else None
            return [A.AllocMemory(A.Ident(name), t, size, tags=frozenset({INIT}))]
        return [A.Assign(A.Ident(name), zero_expr(self.info, t), tags=frozenset({INIT}))]

    def value_check(self, c: A.Contract, f: A.Function) -> bool:
        if f.payable or (f.body and VALUE_CHECK in f.body[0].tags):
            return False
        if not (f.is_interface or (f.is_constructor and self.options.check_constructor_value)):
            return False
        cond = A.BinOp("==", A.Builtin("msg.value"), A.IntLit(0))
        f.body.insert(0, A.Require(cond, tags=frozenset({VALUE_CHECK}), span=f.span))
        return True

    def initializers(self, f: A.Function) -> bool:
        changed = False
        # out-parameters: at the start of the body, after the value check
        start = 1 if f.body and VALUE_CHECK in f.body[0].tags else 0
        done = set()
        k = start
        while k < len(f.body) and INIT in f.body[k].tags:
            done.add(_target_name(f.body[k]))
            k += 1
        prologue: List[A.Stmt] = []
        for r in f.returns:
            if r.name not in done:
                prologue += self.default_init(r.name, r)
        if prologue:
            f.body[start:start] = _with_span(prologue, f.span)
            changed = True
        f.body, ch = self._init_locals(f.body)
        return changed or ch

    def _init_locals(self, body: List[A.Stmt]) -> Tuple[List[A.Stmt], bool]:
        out: List[A.Stmt] = []
        changed = False
        for k, s in enumerate(body):
            if isinstance(s, A.While):
                s.body, ch = self._init_locals(s.body)
                changed = changed or ch
            elif isinstance(s, A.If):
                s.then, ch1 = self._init_locals(s.then)
                s.orelse, ch2 = self._init_locals(s.orelse)
                changed = changed or ch1 or ch2
            out.append(s)
            if isinstance(s, A.VarDecl):
                nxt = body[k + 1] if k + 1 < len(body) else None
                if not _initialises(nxt, s.var.name):
                    out += _with_span(self.default_init(s.var.name, s.var), s.span)
                    changed = True
        return out, changed


def _target_name(s: A.Stmt) -> Optional[str]:
    lhs = getattr(s, "lhs", None)
    return lhs.name if isinstance(lhs, A.Ident) else None


def _initialises(s: Optional[A.Stmt], name: str) -> bool:
    """Whether ``s`` overwrites the whole local ``name`` without reading it first."""
    if s is None:
        return False
    target = A.Ident(name)
    if INIT in s.tags:
        return _target_name(s) == name
    reads = any(x == target for e in A.statement_expressions(s) for x in A.sub_expressions(e)
                if x is not getattr(s, "lhs", None))
    if isinstance(s, A.Assign) and s.lhs == target:
        return not any(x == target for x in A.sub_expressions(s.rhs))
    if isinstance(s, A.AllocMemory) and s.lhs == target:
        return s.size is None or not any(x == target for x in A.sub_expressions(s.size))
    if isinstance(s, A.CreateContract) and s.lhs == target:
        return not reads
    return False


def explicate(p: A.Program, options: Optional[ExplicateOptions] = None) -> A.Program:
    """Return the explicated (Solid) version of a type-checked program."""
    out = copy.deepcopy(p)
    retype(out)
    ex = Explicator(ProgramInfo.build(out), options or ExplicateOptions())
    passes = (ex._preconditions, ex._push, ex._resize, ex._deep_copy, ex._arguments)
    for _ in range(MAX_ROUNDS):
        changed = False
        for fn in passes:
            if ex.rewrite(out, fn):
                retype(out)
                ex.info = ProgramInfo.build(out)
                changed = True
        if not changed:
            break
    else:
        raise RuntimeError("explication did not reach a fixed point")
    for c in out.contracts:
        for f in c.functions:
            ex.value_check(c, f)
            ex.initializers(f)
    retype(out)
    return out
