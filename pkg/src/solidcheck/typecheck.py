"""Type checking and data-location annotation.

The checker works on a deep copy of the parsed program and annotates every
expression with its type (``ty``) and, for reference types, its location kind
(``loc``).  Local variables are renamed when a name is declared twice in one
function so that later passes can treat function bodies as flat scopes.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import ast as A
from .errors import RecursiveType, TypeError, UnknownIdentifier, VisibilityError
from .types import (
    ADDRESS, BOOL, INT, INT_MAX, UINT, UINT_MAX, AddressType, ArrayType,
    ContractType, EnumType, IntType, LocationKind, MappingType, SolidType, StructType,
    UIntType, is_addresslike, is_elementary, is_numeric, is_reference,
)

RESERVED_PREFIX = "__"
_BUILTIN_TYPES = {
    "msg.sender": ADDRESS,
    "msg.value": UINT,
    "tx.origin": ADDRESS,
    "block.timestamp": UINT,
}


@dataclass
class ProgramInfo:
    """Global declarations; user type names are unique program-wide."""

    program: A.Program
    contracts: Dict[str, A.Contract] = field(default_factory=dict)
    structs: Dict[str, A.StructDef] = field(default_factory=dict)
    enums: Dict[str, A.EnumDef] = field(default_factory=dict)

    @classmethod
    def build(cls, p: A.Program) -> "ProgramInfo":
        info = cls(p)
        for c in p.contracts:
            if c.name in info.contracts:
                raise TypeError(f"duplicate contract {c.name}", span=c.span)
            info.contracts[c.name] = c
            for t in c.types:
                if t.name in info.structs or t.name in info.enums:
                    raise TypeError(f"duplicate user type {t.name}", span=t.span)
                if isinstance(t, A.StructDef):
                    info.structs[t.name] = t
                else:
                    if len(set(t.values)) != len(t.values):
                        raise TypeError(f"duplicate enum value in {t.name}", span=t.span)
                    info.enums[t.name] = t
        return info

    def struct_members(self, t: StructType) -> List[A.StateVar]:
        return self.structs[t.name].members

    def enum_values(self, t: EnumType) -> List[str]:
        return self.enums[t.name].values

    def storable_types(self) -> List[SolidType]:
        """Every type that can be stored in a reference cell, in discovery order."""
        seen: List[SolidType] = []

        def visit(t: SolidType):
            if t in seen:
                return
            seen.append(t)
            if isinstance(t, StructType):
                for m in self.struct_members(t):
                    visit(m.type)
            elif isinstance(t, ArrayType):
                visit(t.elem)
            elif isinstance(t, MappingType):
                visit(t.key)
                visit(t.value)

        for c in self.program.contracts:
            for v in c.variables:
                visit(v.type)
            for f in c.functions:
                for lv in f.params + f.returns + A.declared_locals(f):
                    visit(lv.type)
        return seen


def _elementary_key(t: SolidType) -> bool:
    return is_elementary(t)


def check_type_acyclicity(p: A.Program) -> None:
    """Raise RecursiveType if the struct membership graph has a cycle."""
    graph: Dict[str, List[str]] = {}
    for c in p.contracts:
        for t in c.types:
            if isinstance(t, A.StructDef):
                graph[t.name] = sorted({n for m in t.members for n in _structs_in(m.type)})
    state: Dict[str, int] = {}
    stack: List[str] = []

    def dfs(n: str):
        state[n] = 1
        stack.append(n)
        for k in graph.get(n, []):
            if state.get(k) == 1:
                raise RecursiveType(stack[stack.index(k):] + [k])
            if k not in state:
                dfs(k)
        stack.pop()
        state[n] = 2

    for n in graph:
        if n not in state:
            dfs(n)


def _structs_in(t: SolidType) -> List[str]:
    if isinstance(t, StructType):
        return [t.name]
    if isinstance(t, ArrayType):
        return _structs_in(t.elem)
    if isinstance(t, MappingType):
        return _structs_in(t.key) + _structs_in(t.value)
    return []


def assignable(target: SolidType, source: SolidType) -> bool:
    if target == source:
        return True
    return isinstance(target, AddressType) and isinstance(source, ContractType)


def _literalish(e: A.Expr) -> bool:
    if isinstance(e, A.IntLit):
        return True
    if isinstance(e, A.UnOp) and e.op == "-":
        return _literalish(e.operand)
    if isinstance(e, A.BinOp) and e.op in "+-*/%":
        return _literalish(e.left) and _literalish(e.right)
    return False


def _element_loc(base_loc: Optional[LocationKind]) -> LocationKind:
    if base_loc is LocationKind.MEMORY_POINTER:
        return LocationKind.MEMORY_POINTER
    return LocationKind.STORAGE_REFERENCE


class FunctionScope:
    """Name resolution inside one function body."""

    def __init__(self, contract: A.Contract, function: A.Function):
        self.contract = contract
        self.function = function
        self.vars: Dict[str, A.LocalVar] = {}
        self.used: set = set()
        self.this_var = A.LocalVar("this", ContractType(contract.name))

    def declare(self, v: A.LocalVar, rename: bool = True) -> None:
        source = v.name
        shadows = any(sv.name == source for sv in self.contract.variables)
        if (source in self.used or shadows) and rename:
            k = 1
            while f"{RESERVED_PREFIX}{source}_{k}" in self.used:
                k += 1
            v.name = f"{RESERVED_PREFIX}{source}_{k}"
        self.used.add(v.name)
        self.vars[source] = v
        if v.name != source:
            self.vars[v.name] = v

    def lookup(self, name: str) -> Optional[A.LocalVar]:
        if name == "this":
            return self.this_var
        return self.vars.get(name)


class Checker:
    def __init__(self, info: ProgramInfo, solid: bool = False):
        self.info = info
        # Solid mode accepts tool-generated forms (memory length writes, reserved names)
        self.solid = solid

    # -- types ------------------------------------------------------------------

    def check_type(self, t: SolidType, span=None) -> None:
        if isinstance(t, StructType):
            if t.name not in self.info.structs:
                raise TypeError(f"unknown struct {t.name}", span=span)
        elif isinstance(t, EnumType):
            if t.name not in self.info.enums:
                raise TypeError(f"unknown enum {t.name}", span=span)
        elif isinstance(t, ContractType):
            if t.name not in self.info.contracts:
                raise TypeError(f"unknown contract {t.name}", span=span)
        elif isinstance(t, ArrayType):
            if t.size is not None and t.size <= 0:
                raise TypeError("array size must be positive", span=span)
            self.check_type(t.elem, span)
        elif isinstance(t, MappingType):
            if not _elementary_key(t.key):
                raise TypeError(f"mapping key must be elementary, got {t.key}", found=t.key, span=span)
            self.check_type(t.key, span)
            self.check_type(t.value, span)

    # -- contracts ----------------------------------------------------------------

    def check_contract(self, c: A.Contract) -> None:
        seen = set()
        for v in c.variables:
            self.check_name(v.name, v.span)
            if v.name in seen:
                raise TypeError(f"duplicate member variable {v.name}", span=v.span)
            seen.add(v.name)
            self.check_type(v.type, v.span)
        for s in c.structs:
            names = [m.name for m in s.members]
            if len(set(names)) != len(names):
                raise TypeError(f"duplicate member in struct {s.name}", span=s.span)
            for m in s.members:
                self.check_type(m.type, m.span)
        fnames = set()
        for f in c.functions:
            if f.name in fnames:
                raise TypeError(f"duplicate function {f.name} in {c.name}", span=f.span)
            fnames.add(f.name)
        if c.constructor is None:
            c.functions.insert(0, A.Function("constructor", "public", [], [], [], None, True, span=c.span))
        for f in c.functions:
            self.check_function(c, f)

    def check_name(self, name: str, span) -> None:
        if name.startswith(RESERVED_PREFIX) and not self.solid:
            raise TypeError(f"identifier {name!r} uses the reserved prefix {RESERVED_PREFIX!r}", span=span)

    def check_function(self, c: A.Contract, f: A.Function) -> None:
        scope = FunctionScope(c, f)
        if f.is_constructor and f.returns:
            raise TypeError("constructor cannot return values", span=f.span)
        for i, p in enumerate(f.params):
            if not p.name:
                p.name = f"{RESERVED_PREFIX}arg{i}"
            self._check_local_decl(p, scope, is_param=True, public=f.is_interface)
        for i, r in enumerate(f.returns):
            if not r.name:
                r.name = f"{RESERVED_PREFIX}ret{i}"
            self._check_local_decl(r, scope, is_param=True, public=f.is_interface)
        self.check_block(f.body, scope)

    def _check_local_decl(self, v: A.LocalVar, scope: FunctionScope, is_param: bool, public: bool = False):
        if not v.name.startswith(RESERVED_PREFIX) or not is_param:
            self.check_name(v.name, v.span)
        if v.name == "this":
            raise TypeError("'this' cannot be redeclared", span=v.span)
        self.check_type(v.type, v.span)
        if is_reference(v.type):
            if v.location is None:
                v.location = "storage" if isinstance(v.type, MappingType) else "memory"
            if isinstance(v.type, MappingType) and v.location != "storage":
                raise TypeError("mappings can only live in storage", span=v.span)
            if public and is_param and v.location == "storage":
                raise TypeError("storage parameters are only allowed in internal functions", span=v.span)
        elif v.location is not None:
            raise TypeError(f"data location on value-type variable {v.name}", span=v.span)
        if is_param and v.name in scope.used:
            raise TypeError(f"duplicate parameter {v.name}", span=v.span)
        scope.declare(v)

    # -- statements ---------------------------------------------------------------

    def check_block(self, body: List[A.Stmt], scope: FunctionScope) -> None:
        for i, s in enumerate(body):
            if isinstance(s, A.VarDecl) and s.var.location == "storage":
                if not _initialised_next(body[i + 1:], s.var.name):
                    raise TypeError(f"storage pointer {s.var.name} must be initialised", span=s.span)
            self.check_stmt(s, scope)

    def check_stmt(self, s: A.Stmt, scope: FunctionScope) -> None:
        if isinstance(s, A.While) or isinstance(s, A.If):
            self.expect(s.cond, scope, BOOL)
            if isinstance(s, A.While):
                self.check_block(s.body, scope)
            else:
                self.check_block(s.then, scope)
                self.check_block(s.orelse, scope)
        elif isinstance(s, A.VarDecl):
            self._check_local_decl(s.var, scope, is_param=False)
        elif isinstance(s, A.Assign):
            lt = self.lvalue(s.lhs, scope, length_write=True)
            if isinstance(lt, MappingType):
                raise TypeError("mappings cannot be assigned", span=s.span)
            self.expect(s.rhs, scope, lt)
        elif isinstance(s, A.AllocMemory):
            lt = self.lvalue(s.lhs, scope)
            self.check_type(s.type, s.span)
            if not is_reference(s.type) or isinstance(s.type, MappingType):
                raise TypeError(f"cannot allocate {s.type} in memory", span=s.span)
            if lt != s.type:
                raise TypeError("allocation type mismatch", found=s.type, expected=lt, span=s.span)
            if s.size is not None:
                if not (isinstance(s.type, ArrayType) and s.type.size is None):
                    raise TypeError("only dynamic arrays take a size", span=s.span)
                self.expect(s.size, scope, UINT)
        elif isinstance(s, A.Revert):
            pass
        elif isinstance(s, (A.Require, A.VAssume, A.VAssert)):
            self.expect(s.cond, scope, BOOL)
        elif isinstance(s, A.Return):
            outs = scope.function.returns
            if s.exprs and len(s.exprs) != len(outs):
                raise TypeError(f"return expects {len(outs)} values, got {len(s.exprs)}", span=s.span)
            for e, o in zip(s.exprs, outs):
                self.expect(e, scope, o.type)
        elif isinstance(s, A.ContractCall):
            self.check_contract_call(s, scope)
        elif isinstance(s, A.CreateContract):
            target = self.info.contracts.get(s.contract)
            if target is None:
                raise UnknownIdentifier(s.contract, s.span)
            ctor = target.constructor
            params = ctor.params if ctor is not None else []
            self.check_args(s.args, params, scope, s.span)
            if s.value is not None:
                if ctor is None or not ctor.payable:
                    raise TypeError(f"constructor of {s.contract} is not payable", span=s.span)
                self.expect(s.value, scope, UINT)
            if s.lhs is not None:
                lt = self.lvalue(s.lhs, scope)
                if not assignable(lt, ContractType(s.contract)):
                    raise TypeError("contract creation result mismatch", found=ContractType(s.contract), expected=lt, span=s.span)
        elif isinstance(s, (A.Transfer, A.Send)):
            self.expect_addresslike(s.source, scope)
            self.expect_addresslike(s.dest, scope)
            self.expect(s.value, scope, UINT)
            if isinstance(s, A.Send) and s.lhs is not None:
                self.expect_lvalue(s.lhs, scope, BOOL)
        elif isinstance(s, A.Call):
            self.expect_addresslike(s.address, scope)
            self.expect(s.value, scope, UINT)
            if s.lhs is not None:
                self.expect_lvalue(s.lhs, scope, BOOL)
        elif isinstance(s, A.CexPrint):
            t = self.expr(s.arg, scope)
            if not is_elementary(t):
                raise TypeError("CexPrint takes a basic-type argument", found=t, span=s.span)
        elif isinstance(s, A.Push):
            at = self.expr(s.array, scope)
            if not (isinstance(at, ArrayType) and at.size is None):
                raise TypeError("push requires a dynamic array", found=at, span=s.span)
            if s.array.loc is LocationKind.MEMORY_POINTER and not self.solid:
                raise TypeError("push is only available on storage arrays", span=s.span)
            self.expect(s.value, scope, at.elem)
        else:
            raise TypeError(f"unknown statement {type(s).__name__}", span=s.span)

    def check_contract_call(self, s: A.ContractCall, scope: FunctionScope) -> None:
        if s.target is None:
            callee_contract = scope.contract
            s.contract = callee_contract.name
        else:
            tt = self.expr(s.target, scope)
            if not isinstance(tt, ContractType):
                raise TypeError(f"member {s.func} not found on {tt}", found=tt, span=s.span)
            callee_contract = self.info.contracts[tt.name]
            s.contract = tt.name
        try:
            f = callee_contract.function(s.func)
        except KeyError:
            raise UnknownIdentifier(f"{s.contract}.{s.func}", s.span) from None
        if f.is_constructor:
            raise VisibilityError("constructors cannot be called", span=s.span)
        if s.target is not None and not f.is_interface:
            raise VisibilityError(f"{s.contract}.{s.func} is {f.visibility}; external calls need public or external",
                                  span=s.span)
        if s.target is None and f.visibility == "external":
            raise VisibilityError(f"external function {s.func} called internally", span=s.span)
        self.check_args(s.args, f.params, scope, s.span)
        if s.value is not None:
            if s.target is None:
                raise TypeError("value can only be attached to external calls", span=s.span)
            if not f.payable:
                raise TypeError(f"{s.contract}.{s.func} is not payable", span=s.span)
            self.expect(s.value, scope, UINT)
        if s.lhs:
            if len(s.lhs) != len(f.returns):
                raise TypeError(f"{s.func} returns {len(f.returns)} values, {len(s.lhs)} assigned", span=s.span)
            for x, r in zip(s.lhs, f.returns):
                if x is not None:
                    lt = self.lvalue(x, scope)
                    if not assignable(lt, r.type):
                        raise TypeError("call result mismatch", found=r.type, expected=lt, span=s.span)

    def check_args(self, args: List[A.Expr], params: List[A.LocalVar], scope: FunctionScope, span) -> None:
        if len(args) != len(params):
            raise TypeError(f"expected {len(params)} arguments, got {len(args)}", span=span)
        for a, p in zip(args, params):
            self.expect(a, scope, p.type)

    def expect_addresslike(self, e: A.Expr, scope: FunctionScope) -> None:
        t = self.expr(e, scope)
        if not is_addresslike(t):
            raise TypeError("address expected", found=t, expected=ADDRESS, span=e.span)

    def expect_lvalue(self, e: A.Expr, scope: FunctionScope, t: SolidType) -> None:
        lt = self.lvalue(e, scope)
        if not assignable(lt, t):
            raise TypeError("assignment mismatch", found=t, expected=lt, span=e.span)

    # -- expressions --------------------------------------------------------------

    def lvalue(self, e: A.Expr, scope: FunctionScope, length_write: bool = False) -> SolidType:
        t = self.expr(e, scope)
        if isinstance(e, A.Ident):
            if e.name == "this":
                raise TypeError("cannot assign to this", span=e.span)
            return t
        if isinstance(e, A.Index):
            return t
        if isinstance(e, A.Member):
            bt = e.base.ty
            if isinstance(bt, StructType):
                return t
            if isinstance(bt, ArrayType) and e.name == "length" and length_write:
                if bt.size is not None:
                    raise TypeError("cannot resize a fixed-size array", span=e.span)
                if e.base.loc is LocationKind.MEMORY_POINTER and not self.solid:
                    raise TypeError("memory arrays cannot be resized", span=e.span)
                return t
        raise TypeError("expression is not assignable", span=e.span)

    def expect(self, e: A.Expr, scope: FunctionScope, expected: SolidType) -> None:
        t = self.expr(e, scope, expected)
        if not assignable(expected, t):
            raise TypeError(f"expected {expected}, found {t}", found=t, expected=expected, span=e.span)

    def expr(self, e: A.Expr, scope: FunctionScope, hint: Optional[SolidType] = None) -> SolidType:
        t, loc = self._expr(e, scope, hint)
        e.ty = t
        e.loc = loc if is_reference(t) else None
        return t

    def _expr(self, e: A.Expr, scope: FunctionScope, hint: Optional[SolidType]):
        if isinstance(e, A.IntLit):
            t = hint if isinstance(hint, (UIntType, IntType)) else UINT
            limit = UINT_MAX if isinstance(t, UIntType) else INT_MAX + 1
            if e.value > limit:
                raise TypeError(f"literal {e.value} out of range for {t}", span=e.span)
            return t, None
        if isinstance(e, A.BoolLit):
            return BOOL, None
        if isinstance(e, A.EnumLit):
            d = self.info.enums.get(e.enum)
            if d is None or e.member not in d.values:
                raise UnknownIdentifier(f"{e.enum}.{e.member}", e.span)
            return EnumType(e.enum), None
        if isinstance(e, A.Builtin):
            return _BUILTIN_TYPES[e.name], None
        if isinstance(e, A.Ident):
            v = scope.lookup(e.name)
            if v is not None:
                e.name = v.name
                return v.type, v.kind
            for sv in scope.contract.variables:
                if sv.name == e.name:
                    return sv.type, LocationKind.STORAGE_REFERENCE
            raise UnknownIdentifier(e.name, e.span)
        if isinstance(e, A.Member):
            bt = self.expr(e.base, scope)
            if isinstance(bt, StructType):
                for m in self.info.struct_members(bt):
                    if m.name == e.name:
                        return m.type, _element_loc(e.base.loc)
                raise UnknownIdentifier(f"{bt}.{e.name}", e.span)
            if isinstance(bt, ArrayType) and e.name == "length":
                return UINT, None
            if is_addresslike(bt) and e.name == "balance":
                return UINT, None
            raise TypeError(f"type {bt} has no member {e.name}", found=bt, span=e.span)
        if isinstance(e, A.Index):
            bt = self.expr(e.base, scope)
            if isinstance(bt, MappingType):
                self.expect(e.index, scope, bt.key)
                return bt.value, _element_loc(e.base.loc)
            if isinstance(bt, ArrayType):
                self.expect(e.index, scope, UINT)
                return bt.elem, _element_loc(e.base.loc)
            raise TypeError(f"type {bt} cannot be indexed", found=bt, span=e.span)
        if isinstance(e, A.Convert):
            return self._convert(e, scope), None
        if isinstance(e, A.UnOp):
            if e.op == "!":
                self.expect(e.operand, scope, BOOL)
                return BOOL, None
            if e.op == "-":
                want = hint if isinstance(hint, (IntType, UIntType)) and _literalish(e) else None
                t = self.expr(e.operand, scope, want or INT if _literalish(e.operand) else None)
                if not isinstance(t, IntType):
                    raise TypeError("unary minus needs a signed operand", found=t, expected=INT, span=e.span)
                return t, None
        if isinstance(e, A.BinOp):
            return self._binop(e, scope, hint), None
        raise TypeError(f"unsupported expression {type(e).__name__}", span=e.span)

    def _convert(self, e: A.Convert, scope: FunctionScope) -> SolidType:
        target = e.target
        self.check_type(target, e.span)
        if _literalish(e.expr) and is_numeric(target):
            src = self.expr(e.expr, scope, target)
        else:
            src = self.expr(e.expr, scope, UINT if isinstance(e.expr, A.IntLit) else None)
        ok = False
        if is_numeric(target) and (is_numeric(src) or isinstance(src, (AddressType, EnumType))):
            ok = True
        elif isinstance(target, AddressType) and (is_addresslike(src) or isinstance(src, UIntType)):
            ok = True
        elif isinstance(target, ContractType) and (isinstance(src, AddressType) or src == target):
            ok = True
        if not ok:
            raise TypeError(f"cannot convert {src} to {target}", found=src, expected=target, span=e.span)
        return target

    def _binop(self, e: A.BinOp, scope: FunctionScope, hint: Optional[SolidType]) -> SolidType:
        op = e.op
        if op in ("&&", "||"):
            self.expect(e.left, scope, BOOL)
            self.expect(e.right, scope, BOOL)
            return BOOL
        arithmetic = op in ("+", "-", "*", "/", "%")
        lhint = hint if arithmetic else None
        if _literalish(e.left) and not _literalish(e.right):
            rt = self.expr(e.right, scope, lhint)
            lt = self.expr(e.left, scope, rt)
        elif _literalish(e.left) and _literalish(e.right):
            lt = self.expr(e.left, scope, lhint)
            rt = self.expr(e.right, scope, lt)
        else:
            lt = self.expr(e.left, scope, lhint)
            rt = self.expr(e.right, scope, lt)
        if arithmetic:
            if not (is_numeric(lt) and lt == rt):
                raise TypeError(f"operator {op} needs matching integer operands", found=rt, expected=lt, span=e.span)
            return lt
        if op in ("<", ">", "<=", ">="):
            if not (lt == rt and (is_numeric(lt) or isinstance(lt, AddressType))):
                raise TypeError(f"operator {op} needs matching integer operands", found=rt, expected=lt, span=e.span)
            return BOOL
        if op in ("==", "!="):
            if not (is_elementary(lt) and (lt == rt or (is_addresslike(lt) and is_addresslike(rt)))):
                raise TypeError(f"cannot compare {lt} with {rt}", found=rt, expected=lt, span=e.span)
            return BOOL
        raise TypeError(f"unknown operator {op}", span=e.span)


def _initialised_next(rest: List[A.Stmt], name: str) -> bool:
    """Whether the declaration group that follows assigns ``name`` right away."""
    target = A.Ident(name)
    for s in rest:
        if isinstance(s, A.VarDecl):
            continue
        if isinstance(s, A.Assign) and s.lhs == target:
            return True
        if isinstance(s, A.ContractCall):
            return target in s.lhs
        if not isinstance(s, A.Assign):
            return False
    return False


def type_check(p: A.Program, solid: bool = False) -> A.Program:
    """Return an annotated copy of ``p``; raises on the first type error."""
    typed = copy.deepcopy(p)
    info = ProgramInfo.build(typed)
    checker = Checker(info, solid)
    for c in typed.contracts:
        for t in c.types:
            checker.check_name(t.name, t.span)
    check_type_acyclicity(typed)
    for c in typed.contracts:
        checker.check_contract(c)
    return typed


def retype(p: A.Program) -> A.Program:
    """Re-annotate an already-checked program in place, accepting tool-generated forms."""
    info = ProgramInfo.build(p)
    checker = Checker(info, solid=True)
    for c in p.contracts:
        checker.check_contract(c)
    return p


def function_scope(info: ProgramInfo, contract: A.Contract, f: A.Function) -> FunctionScope:
    """Scope with all parameters and declared locals of an already-checked function."""
    scope = FunctionScope(contract, f)
    for v in f.params + f.returns + A.declared_locals(f):
        scope.used.add(v.name)
        scope.vars[v.name] = v
    return scope


def frontend(source: str) -> A.Program:
    from .parser import parse_program

    return type_check(parse_program(source))
