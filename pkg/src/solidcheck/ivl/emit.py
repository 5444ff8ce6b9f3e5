"""Translation of explicated Solid programs into the verification language.

The execution state lives in four globals: the address cells ``s``, the
block ``b``, the transaction ``tx`` and the memory ``m``.  Every contract
function becomes a procedure ``<Contract>_<function>`` taking the receiving
address, the sender and the message as leading parameters.  Reference cells
are records of a type tag and a value; the value record is the union of all
shapes a cell can take (struct members, array ``length``/``data``, a mapping
indexed directly, or a basic value).

Solidity enum values are represented by their index so that conversions to
integers stay plain arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .. import ast as A
from ..errors import SolidError
from ..typecheck import ProgramInfo
from ..types import (
    ADDRESS_MOD, INT_MAX, INT_MIN, UINT_MAX, UINT_MOD, AddressType, ArrayType, BoolType, ContractType,
    EnumType, IntType, LocationKind, MappingType, SolidType, StructType, UIntType, is_reference,
)
from . import ast as I
from .ast import sel

BOOGIE_KEYWORDS = frozenset("""
assert assume axiom bool break call complete const div else ensures exists extends false finite forall
free function goto havoc if implementation int invariant lambda mod modifies old procedure real requires
return returns then true type unique var where while enum record
""".split())

GLOBAL_VARS = ("s", "b", "tx", "m", "main_contract")
IMPLICIT_PARAMS = ("this", "msg_sender", "msg")
AUX_FIXED = ("preM", "preStorage", "preS", "ok")

S, B, TX, M, THIS = I.Var("s"), I.Var("b"), I.Var("tx"), I.Var("m"), I.Var("this")
MAIN = I.Var("main_contract")
NONE = I.Var("None")
UNUSED = I.Var("Unused")
SIMPLE = I.Var("SimpleAddress")
STORAGE = sel(S, THIS, "storage")
CELL = I.record("RefCell")
ADDRESS_CELL = I.record("AddressCell")
MSG = I.record("MsgType")
NO_MEMBERS = "NoMembers"


class EncodingError(SolidError):
    """The program cannot be encoded (for example, two mangled names collide)."""


def quant_name(depth: int) -> str:
    return "v" if depth == 0 else f"v{depth}"


def primed(name: str) -> str:
    return name + "'"


def subst(e: I.Expr, mapping: Dict[str, str]) -> I.Expr:
    """Rename free variables of ``e``."""
    if isinstance(e, I.Var):
        return I.Var(mapping.get(e.name, e.name))
    if isinstance(e, I.Field):
        return I.Field(subst(e.base, mapping), e.name, e.ty)
    if isinstance(e, I.Select):
        return I.Select(subst(e.base, mapping), subst(e.index, mapping), e.ty)
    if isinstance(e, I.Un):
        return I.Un(e.op, subst(e.operand, mapping))
    if isinstance(e, I.Bin):
        return I.Bin(e.op, subst(e.left, mapping), subst(e.right, mapping))
    if isinstance(e, I.Ite):
        return I.Ite(subst(e.cond, mapping), subst(e.then, mapping), subst(e.orelse, mapping))
    if isinstance(e, I.Forall):
        inner = {k: v for k, v in mapping.items() if k not in {n for n, _ in e.bound}}
        return I.Forall(e.bound, subst(e.body, inner))
    return e


def _eq(a: I.Expr, b: I.Expr) -> I.Expr:
    return I.Bin("==", a, b)


def _ne(a: I.Expr, b: I.Expr) -> I.Expr:
    return I.Bin("!=", a, b)


# -- encoding tables ----------------------------------------------------------------------


class Encoding:
    """Program-wide names: reference-type tags, member ids, value-record fields, procedures."""

    def __init__(self, program: A.Program):
        self.program = program
        self.info = ProgramInfo.build(program)
        self.tags: List[SolidType] = []
        self._collect_tags()
        self.member_ids = [f"{c.name}_{v.name}" for c in program.contracts for v in c.variables]
        self._struct_fields = self._union_fields()
        self.procedures: Dict[Tuple[str, str], str] = {}
        for c in program.contracts:
            self.procedures[(c.name, "constructor")] = f"{c.name}_constructor"
            for f in c.functions:
                if not f.is_constructor:
                    self.procedures[(c.name, f.name)] = f"{c.name}_{f.name}"
        self._check_collisions()

    # tags

    def tag(self, t: SolidType) -> str:
        if isinstance(t, UIntType):
            return "uint"
        if isinstance(t, IntType):
            return "int256"
        if isinstance(t, BoolType):
            return "boolean"
        if isinstance(t, (AddressType, ContractType)):
            return "address"
        if isinstance(t, (EnumType, StructType)):
            return t.name
        if isinstance(t, ArrayType):
            return f"{self.tag(t.elem)}[{'' if t.size is None else t.size}]"
        if isinstance(t, MappingType):
            return f"mapping({self.tag(t.key)}=>{self.tag(t.value)})"
        raise EncodingError(f"no tag for {t}")

    def _visit(self, t: SolidType) -> None:
        if t in self.tags:
            return
        self.tags.append(t)
        if isinstance(t, StructType):
            for mem in self.info.struct_members(t):
                if is_reference(mem.type):
                    self._visit(mem.type)
        elif isinstance(t, ArrayType) and is_reference(t.elem):
            self._visit(t.elem)
        elif isinstance(t, MappingType) and is_reference(t.value):
            self._visit(t.value)

    def _collect_tags(self) -> None:
        for c in self.program.contracts:
            for v in c.variables:
                self._visit(v.type)
        for c in self.program.contracts:
            for f in c.functions:
                for lv in f.params + f.returns + A.declared_locals(f):
                    if is_reference(lv.type):
                        self._visit(lv.type)
                for s in A.walk_statements(f.body):
                    if isinstance(s, A.AllocMemory):
                        self._visit(s.type)

    # value record

    def _union_fields(self) -> Dict[Tuple[str, str], str]:
        by_name: Dict[str, set] = {}
        for st in self.info.structs.values():
            for mem in st.members:
                by_name.setdefault(mem.name, set()).add(self.local_type(mem.type))
        out = {}
        for st in self.info.structs.values():
            for mem in st.members:
                clash = len(by_name[mem.name]) > 1 or mem.name in ("length", "data")
                out[(st.name, mem.name)] = f"{st.name}_{mem.name}" if clash else mem.name
        return out

    def field(self, struct: str, member: str) -> str:
        return self._struct_fields[(struct, member)]

    def value_fields(self) -> List[Tuple[str, I.IType]]:
        fields: List[Tuple[str, I.IType]] = []
        seen = set()
        for st in self.info.structs.values():
            for mem in st.members:
                name = self.field(st.name, mem.name)
                if name not in seen:
                    seen.add(name)
                    fields.append((name, self.local_type(mem.type)))
        return fields + [("length", I.UINT), ("data", I.MapT(I.INT, I.INT))]

    # types and defaults

    def local_type(self, t: SolidType) -> I.IType:
        if isinstance(t, UIntType):
            return I.UINT
        if isinstance(t, IntType):
            return I.INT
        if isinstance(t, BoolType):
            return I.BOOL
        if isinstance(t, (AddressType, ContractType)):
            return I.ADDRESS
        if isinstance(t, EnumType):
            return I.INT
        return I.REF

    def default(self, t: SolidType) -> I.Expr:
        return I.Lit(False) if isinstance(t, BoolType) else I.Lit(0)

    def _check_collisions(self) -> None:
        names: Dict[str, str] = {}

        def claim(name: str, what: str):
            if name in names:
                raise EncodingError(f"name collision: {name} is both {names[name]} and {what}")
            names[name] = what

        for n in ("Ref", "Address", "UInt", "Int", "AddressType", "MemberIds", "RefTypes", "RefValue",
                  "RefCell", "AddressCell", "BType", "TxType", "MsgType") + GLOBAL_VARS:
            claim(n, "a predefined name")
        claim("Unused", "an address type")
        claim("SimpleAddress", "an address type")
        for c in self.program.contracts:
            claim(c.name, "a contract")
        for mid in self.member_ids:
            claim(mid, "a member id")
        if not self.member_ids:
            claim(NO_MEMBERS, "the empty member-id placeholder")
        claim("None", "a reference type")
        for t in self.tags:
            claim(self.tag(t), "a reference type")
        for name in self.procedures.values():
            claim(name, "a procedure")
        for n in ("main", "callP"):
            claim(n, "a harness procedure")
        for n in names:
            if n in BOOGIE_KEYWORDS:
                raise EncodingError(f"name collision: {n} is a keyword")
        self.global_names = frozenset(names)

    # declarations

    def prelude(self) -> List[I.Decl]:
        contracts = [c.name for c in self.program.contracts]
        return [
            I.TypeSynonym("Ref", I.INT),
            I.TypeSynonym("Address", I.INT),
            I.TypeSynonym("UInt", I.INT),
            I.TypeSynonym("Int", I.INT),
            I.EnumDecl("AddressType", ["Unused", "SimpleAddress"] + contracts),
            I.EnumDecl("MemberIds", list(self.member_ids) or [NO_MEMBERS]),
            I.EnumDecl("RefTypes", ["None"] + [self.tag(t) for t in self.tags]),
            I.RecordDecl("RefValue", self.value_fields()),
            I.RecordDecl("AddressCell", [("type", I.enum("AddressType")), ("balance", I.UINT),
                                         ("members", I.MapT(I.enum("MemberIds"), I.REF)),
                                         ("storage", I.MapT(I.REF, CELL))]),
            I.RecordDecl("RefCell", [("type", I.enum("RefTypes")), ("value", I.record("RefValue"))]),
            I.RecordDecl("BType", [("time", I.UINT)]),
            I.RecordDecl("TxType", [("origin", I.ADDRESS)]),
            I.RecordDecl("MsgType", [("value", I.UINT)]),
            I.GlobalVar("s", I.MapT(I.ADDRESS, ADDRESS_CELL)),
            I.GlobalVar("b", I.record("BType")),
            I.GlobalVar("tx", I.record("TxType")),
            I.GlobalVar("m", I.MapT(I.REF, CELL)),
            I.GlobalVar("main_contract", I.ADDRESS),
        ]


# -- allocation and initialisation ---------------------------------------------------------


def pre_map_name(refmap: I.Expr) -> str:
    return "preM" if refmap == M else "preStorage"


@dataclass
class CellBuilder:
    """Allocation and default initialisation of reference-cell trees.

    ``need`` is told about auxiliary variables (pre-state snapshots) that the
    generated code uses, so the enclosing procedure can declare them.
    """

    enc: Encoding
    need: Callable[[str, I.IType], None] = lambda name, t: None

    def tag(self, t: SolidType) -> I.Expr:
        return I.Var(self.enc.tag(t))

    def allocation(self, refmap: I.Expr, ref: I.Expr, t: SolidType) -> List[I.Stmt]:
        return ([I.Assume(_eq(sel(refmap, ref, "type"), NONE)),
                 I.Assign(sel(refmap, ref, "type"), self.tag(t))]
                + self.allocate_children(refmap, ref, t, ()))

    def _children(self, refmap: I.Expr, ref: I.Expr, t: SolidType, bound):
        """(reference-typed child expression, its type, bound variables) of one tree level."""
        cell = sel(refmap, ref, "value")
        if isinstance(t, StructType):
            for mem in self.enc.info.struct_members(t):
                if is_reference(mem.type):
                    yield I.Field(cell, self.enc.field(t.name, mem.name), I.REF), mem.type, bound
        elif isinstance(t, ArrayType) and is_reference(t.elem):
            v = quant_name(len(bound))
            yield I.Select(I.Field(cell, "data"), I.Var(v), I.REF), t.elem, bound + ((v, I.INT),)
        elif isinstance(t, MappingType) and is_reference(t.value):
            v = quant_name(len(bound))
            yield I.Select(cell, I.Var(v), I.REF), t.value, bound + ((v, self.enc.local_type(t.key)),)

    def allocate_children(self, refmap, ref, t, bound) -> List[I.Stmt]:
        kids = list(self._children(refmap, ref, t, bound))
        out: List[I.Stmt] = []
        for e, ct, b in kids:
            out += self.allocate_one(refmap, e, ct, b)
        for e, ct, b in kids:
            out += self.allocate_children(refmap, e, ct, b)
        return out

    def allocate_one(self, refmap, e, t, bound) -> List[I.Stmt]:
        cell_type = sel(refmap, e, "type")
        if not bound:
            return [I.Assume(_eq(cell_type, NONE)), I.Assign(cell_type, self.tag(t))]
        names = {n: primed(n) for n, _ in bound}
        bound2 = tuple(bound) + tuple((primed(n), ty) for n, ty in bound)
        diff = I.disj([_ne(I.Var(n), I.Var(primed(n))) for n, _ in bound])
        pre = I.Var(pre_map_name(refmap))
        self.need(pre.name, I.MapT(I.REF, CELL))
        r = I.Var("r")
        return [
            I.Assume(I.forall(bound, _eq(cell_type, NONE))),
            I.Assume(I.forall(bound2, I.Bin("==>", diff, _ne(e, subst(e, names))))),
            I.Assign(pre, refmap),
            I.Havoc(refmap),
            I.Assume(I.Forall((("r", I.REF),), I.Bin("==>", _ne(sel(pre, r, "type"), NONE),
                                                      _eq(I.Select(pre, r), I.Select(refmap, r))))),
            I.Assume(I.forall(bound, _eq(cell_type, self.tag(t)))),
        ]

    def initialisation(self, refmap: I.Expr, ref: I.Expr, t: SolidType, bound=()) -> List[I.Stmt]:
        cell = sel(refmap, ref, "value")
        lt = self.enc.local_type
        out: List[I.Stmt] = []

        def pin(e, ty, b=bound):
            out.append(I.Assume(I.forall(b, _eq(e, self.enc.default(ty)))))

        if isinstance(t, StructType):
            for mem in self.enc.info.struct_members(t):
                f = I.Field(cell, self.enc.field(t.name, mem.name), lt(mem.type))
                if is_reference(mem.type):
                    out += self.initialisation(refmap, f, mem.type, bound)
                else:
                    pin(f, mem.type)
        elif isinstance(t, ArrayType):
            length = I.Lit(0 if t.size is None else t.size)
            out.append(I.Assume(I.forall(bound, _eq(I.Field(cell, "length", I.UINT), length))))
            v = quant_name(len(bound))
            b2 = bound + ((v, I.INT),)
            elem = I.Select(I.Field(cell, "data"), I.Var(v), lt(t.elem))
            if is_reference(t.elem):
                out += self.initialisation(refmap, elem, t.elem, b2)
            else:
                pin(elem, t.elem, b2)
        elif isinstance(t, MappingType):
            v = quant_name(len(bound))
            b2 = bound + ((v, lt(t.key)),)
            elem = I.Select(cell, I.Var(v), lt(t.value))
            if is_reference(t.value):
                out += self.initialisation(refmap, elem, t.value, b2)
            else:
                pin(elem, t.value, b2)
        else:
            pin(sel(refmap, ref, "value", ty=lt(t)), t)
        return out


def emit_allocation(enc: Encoding, refmap: I.Expr, ref: I.Expr, t: SolidType) -> List[I.Stmt]:
    return CellBuilder(enc).allocation(refmap, ref, t)


def emit_initialisation(enc: Encoding, refmap: I.Expr, ref: I.Expr, t: SolidType) -> List[I.Stmt]:
    return CellBuilder(enc).initialisation(refmap, ref, t)


def member_ref(c: A.Contract, name: str, addr: I.Expr = THIS) -> I.Expr:
    return I.Select(sel(S, addr, "members"), I.Var(f"{c.name}_{name}"), I.REF)


def emit_lazy_deployment(enc: Encoding, c: A.Contract, cells: Optional[CellBuilder] = None) -> List[I.Stmt]:
    cells = cells or CellBuilder(enc)
    body: List[I.Stmt] = [I.Assign(sel(S, THIS, "type"), I.Var(c.name))]
    for v in c.variables:
        body += cells.allocation(STORAGE, member_ref(c, v.name), v.type)
    return [I.If(_eq(sel(S, THIS, "type"), UNUSED), body), I.Assume(_eq(sel(S, THIS, "type"), I.Var(c.name)))]


def emit_deploy_contract(enc: Encoding, c: A.Contract, cells: Optional[CellBuilder] = None) -> List[I.Stmt]:
    cells = cells or CellBuilder(enc)
    out: List[I.Stmt] = [I.Assign(sel(S, THIS, "type"), I.Var(c.name)), I.Assign(sel(S, THIS, "balance"), I.Lit(0))]
    for v in c.variables:
        out += cells.allocation(STORAGE, member_ref(c, v.name), v.type)
    for v in c.variables:
        out += cells.initialisation(STORAGE, member_ref(c, v.name), v.type)
    return out


# -- arithmetic ----------------------------------------------------------------------------------


def wrap_uint(e: I.Expr) -> I.Expr:
    return I.Bin("mod", e, I.Lit(UINT_MOD))


def wrap_int(e: I.Expr) -> I.Expr:
    half = I.Lit(-INT_MIN)
    return I.Bin("-", I.Bin("mod", I.Bin("+", e, half), I.Lit(UINT_MOD)), half)


def wrap_for(t: SolidType, e: I.Expr) -> I.Expr:
    return wrap_int(e) if isinstance(t, IntType) else wrap_uint(e)


def _abs(e: I.Expr) -> I.Expr:
    return I.Ite(I.Bin(">=", e, I.Lit(0)), e, I.Un("-", e))


def truncated_div(a: I.Expr, b: I.Expr) -> I.Expr:
    q = I.Bin("div", _abs(a), _abs(b))
    same = _eq(I.Bin(">=", a, I.Lit(0)), I.Bin(">=", b, I.Lit(0)))
    return I.Ite(same, q, I.Un("-", q))


def in_range(t: SolidType, e: I.Expr, enc: Encoding) -> Optional[I.Expr]:
    """Value-range assumption for havoc'd basic values of type ``t``."""
    if isinstance(t, UIntType):
        return I.Bin("&&", I.Bin("<=", I.Lit(0), e), I.Bin("<=", e, I.Lit(UINT_MAX)))
    if isinstance(t, IntType):
        return I.Bin("&&", I.Bin("<=", I.Lit(INT_MIN), e), I.Bin("<=", e, I.Lit(INT_MAX)))
    if isinstance(t, (AddressType, ContractType)):
        return I.Bin("&&", I.Bin("<=", I.Lit(0), e), I.Bin("<", e, I.Lit(ADDRESS_MOD)))
    if isinstance(t, EnumType):
        n = len(enc.info.enums[t.name].values)
        return I.Bin("&&", I.Bin("<=", I.Lit(0), e), I.Bin("<", e, I.Lit(n)))
    return None


# -- procedures ------------------------------------------------------------------------------------


@dataclass
class ProcContext:
    enc: Encoding
    contract: A.Contract
    function: Optional[A.Function]
    names: Dict[str, str] = field(default_factory=dict)
    aux: Dict[str, I.IType] = field(default_factory=dict)
    counter: int = 0

    def need(self, name: str, t: I.IType) -> None:
        self.aux.setdefault(name, t)

    def fresh(self, base: str, t: I.IType) -> I.Var:
        self.counter += 1
        name = f"${base}{self.counter}"
        self.aux[name] = t
        return I.Var(name)

    def bind(self, name: str) -> str:
        taken = set(self.names.values())
        out = name
        while (out in BOOGIE_KEYWORDS or out in self.enc.global_names or out in IMPLICIT_PARAMS
               or out in AUX_FIXED or out in taken or out in ("r", "v") or out.startswith("v")
               and out[1:].isdigit()):
            out += "_"
        self.names[name] = out
        return out


class ProcedureEmitter:
    def __init__(self, enc: Encoding, contract: A.Contract, function: A.Function):
        self.enc = enc
        self.contract = contract
        self.function = function
        self.ctx = ProcContext(enc, contract, function)
        self.cells = CellBuilder(enc, self.ctx.need)

    # expressions

    def refmap(self, e: A.Expr) -> I.Expr:
        return M if e.loc is LocationKind.MEMORY_POINTER else STORAGE

    def expr(self, e: A.Expr) -> I.Expr:
        lt = self.enc.local_type
        if isinstance(e, A.IntLit):
            return I.Lit(e.value)
        if isinstance(e, A.BoolLit):
            return I.Lit(e.value)
        if isinstance(e, A.EnumLit):
            return I.Lit(self.enc.info.enums[e.enum].values.index(e.member))
        if isinstance(e, A.Builtin):
            return {"msg.sender": I.Var("msg_sender"), "msg.value": sel(I.Var("msg"), "value", ty=I.UINT),
                    "tx.origin": sel(TX, "origin", ty=I.ADDRESS)}.get(e.name, sel(B, "time", ty=I.UINT))
        if isinstance(e, A.Ident):
            if e.name == "this":
                return THIS
            if e.name in self.ctx.names:
                return I.Var(self.ctx.names[e.name])
            ref = member_ref(self.contract, e.name)
            if is_reference(e.ty):
                return ref
            return sel(STORAGE, ref, "value", ty=lt(e.ty))
        if isinstance(e, A.Member):
            if e.name == "balance" and not isinstance(e.base.ty, StructType):
                return sel(S, self.expr(e.base), "balance", ty=I.UINT)
            cell = sel(self.refmap(e.base), self.expr(e.base), "value")
            if isinstance(e.base.ty, ArrayType):
                return I.Field(cell, "length", I.UINT)
            return I.Field(cell, self.enc.field(e.base.ty.name, e.name), lt(e.ty))
        if isinstance(e, A.Index):
            cell = sel(self.refmap(e.base), self.expr(e.base), "value")
            if isinstance(e.base.ty, MappingType):
                return I.Select(cell, self.expr(e.index), lt(e.ty))
            return I.Select(I.Field(cell, "data"), self.expr(e.index), lt(e.ty))
        if isinstance(e, A.UnOp):
            v = self.expr(e.operand)
            if e.op == "!":
                return I.Un("!", v)
            return wrap_for(e.ty, I.Bin("-", I.Lit(0), v))
        if isinstance(e, A.BinOp):
            return self.binop(e)
        if isinstance(e, A.Convert):
            v = self.expr(e.expr)
            src, dst = e.expr.ty, e.target
            if isinstance(dst, (UIntType, IntType)) and not isinstance(src, type(dst)):
                return wrap_for(dst, v)
            if isinstance(dst, AddressType) and isinstance(src, (UIntType, IntType)):
                return I.Bin("mod", v, I.Lit(ADDRESS_MOD))
            return v
        raise EncodingError(f"cannot encode expression {type(e).__name__}")

    def binop(self, e: A.BinOp) -> I.Expr:
        a, b = self.expr(e.left), self.expr(e.right)
        op = e.op
        if op in ("&&", "||", "==", "!=", "<", ">", "<=", ">="):
            return I.Bin(op, a, b)
        if op in ("+", "-", "*"):
            return wrap_for(e.ty, I.Bin(op, a, b))
        signed = isinstance(e.ty, IntType)
        if op == "/":
            return wrap_int(truncated_div(a, b)) if signed else I.Bin("div", a, b)
        if signed:
            return I.Bin("-", a, I.Bin("*", b, truncated_div(a, b)))
        return I.Bin("mod", a, b)

    # statements

    def block(self, body: Sequence[A.Stmt]) -> List[I.Stmt]:
        out: List[I.Stmt] = []
        for s in body:
            out += self.stmt(s)
        return out

    def set_bal(self, src: I.Expr, dst: I.Expr, v: I.Expr) -> List[I.Stmt]:
        return [I.Assign(sel(S, src, "balance"), I.Bin("-", sel(S, src, "balance"), v)),
                I.Assign(sel(S, dst, "balance"), I.Bin("+", sel(S, dst, "balance"), v))]

    def snapshot(self, e: I.Expr, base: str, t: I.IType, out: List[I.Stmt]) -> I.Expr:
        if isinstance(e, (I.Var, I.Lit)):
            return e
        v = self.ctx.fresh(base, t)
        out.append(I.Assign(v, e))
        return v

    def stmt(self, s: A.Stmt) -> List[I.Stmt]:
        handler = getattr(self, "_" + type(s).__name__)
        return handler(s)

    def _VarDecl(self, s):
        return []

    def _Assign(self, s):
        return [I.Assign(self.expr(s.lhs), self.expr(s.rhs))]

    def _If(self, s):
        return [I.If(self.expr(s.cond), self.block(s.then), self.block(s.orelse))]

    def _While(self, s):
        return [I.While(self.expr(s.cond), self.block(s.body))]

    def _AllocMemory(self, s):
        out: List[I.Stmt] = []
        size = None if s.size is None else self.snapshot(self.expr(s.size), "n", I.UINT, out)
        r = self.ctx.fresh("r", I.REF)
        out.append(I.Havoc(r))
        out += self.cells.allocation(M, r, s.type)
        out += self.cells.initialisation(M, r, s.type)
        if size is not None:
            out.append(I.Assign(sel(M, r, "value", "length", ty=I.UINT), size))
        out.append(I.Assign(self.expr(s.lhs), r))
        return out

    def _Push(self, s):
        out: List[I.Stmt] = []
        v = self.snapshot(self.expr(s.value), "v", self.enc.local_type(s.value.ty), out)
        cell = sel(self.refmap(s.array), self.expr(s.array), "value")
        n = self.ctx.fresh("n", I.UINT)
        out += [I.Assign(n, I.Field(cell, "length", I.UINT)),
                I.Assign(I.Field(cell, "length", I.UINT), I.Bin("+", n, I.Lit(1))),
                I.Assign(I.Select(I.Field(cell, "data"), n, self.enc.local_type(s.value.ty)), v)]
        return out

    def _Revert(self, s):
        return [I.Assume(I.Lit(False))]

    def _Require(self, s):
        return [I.Assume(self.expr(s.cond))]

    _VAssume = _Require

    def _VAssert(self, s):
        return [I.Assert(self.expr(s.cond))]

    def _CexPrint(self, s):
        return [I.Comment(f"CexPrint_{s.name}")]

    def _Return(self, s):
        out: List[I.Stmt] = []
        for r, e in zip(self.function.returns, s.exprs):
            out.append(I.Assign(I.Var(self.ctx.names[r.name]), self.expr(e)))
        return out + [I.Return()]

    def _operands(self, s, out):
        src = self.snapshot(self.expr(s.source), "src", I.ADDRESS, out)
        dst = self.snapshot(self.expr(s.dest), "dst", I.ADDRESS, out)
        v = self.snapshot(self.expr(s.value), "amount", I.UINT, out)
        return src, dst, v

    def _Transfer(self, s):
        out: List[I.Stmt] = []
        src, dst, v = self._operands(s, out)
        out += [
            I.Assume(_ne(sel(S, dst, "type"), UNUSED)),
            I.Assume(I.Bin(">=", sel(S, src, "balance"), v)),
            I.If(_ne(sel(S, dst, "type"), SIMPLE), [I.If(I.Star(), [I.Assume(I.Lit(False))])]),
        ]
        return out + self.set_bal(src, dst, v)

    def _Send(self, s):
        out: List[I.Stmt] = []
        src, dst, v = self._operands(s, out)
        ok = self.ctx.fresh("ok", I.BOOL)
        out += [
            I.Assume(_ne(sel(S, dst, "type"), UNUSED)),
            I.Assign(ok, I.Bin(">=", sel(S, src, "balance"), v)),
            I.If(I.Bin("&&", ok, _ne(sel(S, dst, "type"), SIMPLE)), [I.If(I.Star(), [I.Assign(ok, I.Lit(False))])]),
            I.If(ok, self.set_bal(src, dst, v)),
        ]
        if s.lhs is not None:
            out.append(I.Assign(self.expr(s.lhs), ok))
        return out

    def _Call(self, s):
        out: List[I.Stmt] = []
        addr = self.snapshot(self.expr(s.address), "dst", I.ADDRESS, out)
        v = self.snapshot(self.expr(s.value), "amount", I.UINT, out)
        ok = self.ctx.fresh("ok", I.BOOL)
        out.append(I.CallStmt([ok], "callP", [THIS, addr, v]))
        if s.lhs is not None:
            out.append(I.Assign(self.expr(s.lhs), ok))
        return out

    def _ContractCall(self, s):
        callee = self.enc.info.contracts[s.contract].function(s.func)
        proc = self.enc.procedures[(s.contract, s.func)]
        out: List[I.Stmt] = []
        args = [self.snapshot(self.expr(a), "arg", self.enc.local_type(p.type), out)
                for a, p in zip(s.args, callee.params)]
        if s.target is None:
            head = [THIS, I.Var("msg_sender"), I.Var("msg")]
        else:
            t = self.snapshot(self.expr(s.target), "dst", I.ADDRESS, out)
            v = I.Lit(0) if s.value is None else self.snapshot(self.expr(s.value), "amount", I.UINT, out)
            mv = self.ctx.fresh("msg", MSG)
            out += [I.Assume(_eq(sel(S, t, "type"), I.Var(s.contract))),
                    I.Assume(I.Bin(">=", sel(S, THIS, "balance"), v))]
            out += self.set_bal(THIS, t, v)
            out.append(I.Assign(sel(mv, "value", ty=I.UINT), v))
            head = [t, THIS, mv]
        outs = [self.ctx.fresh("out", self.enc.local_type(r.type)) for r in callee.returns]
        out.append(I.CallStmt(list(outs), proc, head + args))
        for x, o in zip(s.lhs, outs):
            if x is not None:
                out.append(I.Assign(self.expr(x), o))
        return out

    def _CreateContract(self, s):
        ctor = self.enc.info.contracts[s.contract].constructor
        params = ctor.params if ctor is not None else []
        out: List[I.Stmt] = []
        args = [self.snapshot(self.expr(a), "arg", self.enc.local_type(p.type), out)
                for a, p in zip(s.args, params)]
        v = I.Lit(0) if s.value is None else self.snapshot(self.expr(s.value), "amount", I.UINT, out)
        a = self.ctx.fresh("new", I.ADDRESS)
        mv = self.ctx.fresh("msg", MSG)
        out += [
            I.Havoc(a),
            I.Assume(_ne(a, I.Lit(0))),
            I.Assume(_eq(sel(S, a, "type"), UNUSED)),
            I.Assume(I.Bin(">=", sel(S, THIS, "balance"), v)),
            I.Assign(sel(S, THIS, "balance"), I.Bin("-", sel(S, THIS, "balance"), v)),
            I.Assign(sel(mv, "value", ty=I.UINT), v),
            I.CallStmt([], self.enc.procedures[(s.contract, "constructor")], [a, THIS, mv] + args),
        ]
        if s.lhs is not None:
            out.append(I.Assign(self.expr(s.lhs), a))
        return out

    # the procedure

    def emit(self) -> I.Procedure:
        f = self.function
        c = self.contract
        lt = self.enc.local_type
        params = [("this", I.ADDRESS), ("msg_sender", I.ADDRESS), ("msg", MSG)]
        params += [(self.ctx.bind(p.name), lt(p.type)) for p in f.params]
        returns = [(self.ctx.bind(r.name), lt(r.type)) for r in f.returns]
        local_decls = [(self.ctx.bind(v.name), lt(v.type)) for v in A.declared_locals(f)]
        if f.is_constructor:
            head = emit_deploy_contract(self.enc, c, self.cells)
            head.append(I.Assign(sel(S, THIS, "balance"),
                                 I.Bin("+", sel(S, THIS, "balance"), sel(I.Var("msg"), "value", ty=I.UINT))))
        else:
            head = emit_lazy_deployment(self.enc, c, self.cells)
        for p in f.params:
            if is_reference(p.type):
                refmap = STORAGE if p.location == "storage" else M
                head.append(I.Assume(_eq(sel(refmap, I.Var(self.ctx.names[p.name]), "type"),
                                         I.Var(self.enc.tag(p.type)))))
        body = self.block(f.body)
        name = self.enc.procedures[(c.name, "constructor" if f.is_constructor else f.name)]
        return I.Procedure(name, params, returns, local_decls + list(self.ctx.aux.items()), head + body)


def emit_procedure(enc: Encoding, c: A.Contract, f: A.Function) -> I.Procedure:
    return ProcedureEmitter(enc, c, f).emit()


def _implicit_constructor(c: A.Contract) -> A.Function:
    return A.Function("constructor", "public", [], [], [], None, True)


# -- harnesses ----------------------------------------------------------------------------------


class HarnessEmitter:
    """``main`` and ``callP`` for the contract or the function harness."""

    def __init__(self, enc: Encoding, contract: A.Contract, kind: str, function: Optional[str] = None):
        self.enc = enc
        self.contract = contract
        self.kind = kind
        self.function = function
        self.locals: Dict[str, I.IType] = {}
        self.cells = CellBuilder(enc, lambda n, t: self.locals.setdefault(n, t))

    def _local(self, name: str, t: I.IType) -> I.Var:
        self.locals.setdefault(name, t)
        return I.Var(name)

    def initial_state(self) -> List[I.Stmt]:
        a, r = I.Var("a"), I.Var("r")
        return [
            I.Assume(_ne(MAIN, I.Lit(0))),
            I.Assume(I.Forall((("a", I.ADDRESS),), I.disj([_eq(sel(S, a, "type"), UNUSED),
                                                           _eq(sel(S, a, "type"), SIMPLE)]))),
            I.Assume(I.Forall((("a", I.ADDRESS),), I.Bin(">=", sel(S, a, "balance"), I.Lit(0)))),
            I.Assume(I.Forall((("r", I.REF),), _eq(sel(M, r, "type"), NONE))),
        ]

    def frame(self, keep_main: bool) -> List[I.Stmt]:
        """Havoc balances and basic storage values; types and references stay fixed."""
        pre = self._local("preS", I.MapT(I.ADDRESS, ADDRESS_CELL))
        a, r, k = I.Var("a"), I.Var("r"), I.Var("k")

        def guarded(body: I.Expr) -> I.Expr:
            return I.Bin("==>", _ne(a, MAIN), body) if keep_main else body

        cell, pcell = sel(S, a, "storage", r), sel(pre, a, "storage", r)
        out: List[I.Stmt] = [
            I.Assign(pre, S),
            I.Havoc(S),
            I.Assume(I.Forall((("a", I.ADDRESS),), I.conj([
                _eq(sel(S, a, "type"), sel(pre, a, "type")),
                _eq(sel(S, a, "members"), sel(pre, a, "members")),
                I.Bin(">=", sel(S, a, "balance"), I.Lit(0))]))),
            I.Assume(I.Forall((("a", I.ADDRESS), ("r", I.REF)), _eq(sel(cell, "type"), sel(pcell, "type")))),
        ]
        for t in self.enc.tags:
            is_t = _eq(sel(pcell, "type"), I.Var(self.enc.tag(t)))
            if isinstance(t, StructType):
                for mem in self.enc.info.struct_members(t):
                    if is_reference(mem.type):
                        f = self.enc.field(t.name, mem.name)
                        same = _eq(sel(cell, "value", f, ty=I.REF), sel(pcell, "value", f, ty=I.REF))
                        out.append(I.Assume(I.Forall((("a", I.ADDRESS), ("r", I.REF)),
                                                     guarded(I.Bin("==>", is_t, same)))))
            elif isinstance(t, ArrayType) and is_reference(t.elem):
                same = _eq(sel(cell, "value", "data", k, ty=I.REF), sel(pcell, "value", "data", k, ty=I.REF))
                out.append(I.Assume(I.Forall((("a", I.ADDRESS), ("r", I.REF), ("k", I.INT)),
                                             guarded(I.Bin("==>", is_t, same)))))
            elif isinstance(t, MappingType) and is_reference(t.value):
                kt = self.enc.local_type(t.key)
                same = _eq(sel(cell, "value", k, ty=I.REF), sel(pcell, "value", k, ty=I.REF))
                out.append(I.Assume(I.Forall((("a", I.ADDRESS), ("r", I.REF), ("k", kt)),
                                             guarded(I.Bin("==>", is_t, same)))))
        if keep_main:
            out.append(I.Assume(_eq(I.Select(S, MAIN), I.Select(pre, MAIN))))
        return out

    def invoke(self, f: A.Function, proc: str, sender: I.Expr, target: I.Expr, prefix: str) -> List[I.Stmt]:
        """Havoc message and arguments, move the value, call ``proc``."""
        mv = self._local(f"{prefix}msg", MSG)
        value = sel(mv, "value", ty=I.UINT)
        out: List[I.Stmt] = [I.Havoc(mv), I.Assume(in_range(UIntType(), value, self.enc))]
        if not f.payable:
            out.append(I.Assume(_eq(value, I.Lit(0))))
        out.append(I.Assume(I.Bin(">=", sel(S, sender, "balance"), value)))
        if f.is_constructor:
            out.append(I.Assign(sel(S, sender, "balance"), I.Bin("-", sel(S, sender, "balance"), value)))
        else:
            out += [I.Assign(sel(S, sender, "balance"), I.Bin("-", sel(S, sender, "balance"), value)),
                    I.Assign(sel(S, target, "balance"), I.Bin("+", sel(S, target, "balance"), value))]
        args = []
        for k, p in enumerate(f.params):
            t = self.enc.local_type(p.type)
            x = self._local(f"{prefix}{f.name}_{k}", t)
            out.append(I.Havoc(x))
            if is_reference(p.type):
                out += self.cells.allocation(M, x, p.type) + self.cells.initialisation(M, x, p.type)
            else:
                rng = in_range(p.type, x, self.enc)
                if rng is not None:
                    out.append(I.Assume(rng))
            args.append(x)
        out.append(I.CallStmt([self._local(f"{prefix}{f.name}_out{k}", self.enc.local_type(r.type))
                               for k, r in enumerate(f.returns)], proc, [target, sender, mv] + args))
        return out

    def choice(self, branches: List[List[I.Stmt]]) -> List[I.Stmt]:
        if not branches:
            return []
        out = branches[-1]
        for br in reversed(branches[:-1]):
            out = [I.If(I.Star(), br, out)]
        return out

    def new_transaction(self) -> Tuple[List[I.Stmt], I.Var]:
        sender = self._local("sender", I.ADDRESS)
        return [I.Havoc(B), I.Havoc(TX), I.Assign(sender, sel(TX, "origin", ty=I.ADDRESS)),
                I.Assume(_eq(sel(S, sender, "type"), SIMPLE)), I.Assume(_ne(sender, MAIN))], sender

    def main(self) -> I.Procedure:
        c = self.contract
        body = self.initial_state()
        if self.kind == "contract":
            body.append(I.Assume(_eq(sel(S, MAIN, "type"), UNUSED)))
            start, sender = self.new_transaction()
            ctor = c.constructor or _implicit_constructor(c)
            body += start + self.invoke(ctor, self.enc.procedures[(c.name, "constructor")], sender, MAIN, "")
            calls = [self.invoke(f, self.enc.procedures[(c.name, f.name)], sender, MAIN, "")
                     for f in c.interface]
            if calls:
                step, _ = self.new_transaction()
                body.append(I.While(I.Star(), self.frame(keep_main=True) + step + self.choice(calls)))
        else:
            f = c.function(self.function)
            body.append(I.Assume(_eq(sel(S, MAIN, "type"), UNUSED)))
            start, sender = self.new_transaction()
            body += start + self.invoke(f, self.enc.procedures[(c.name, f.name)], sender, MAIN, "")
        return I.Procedure("main", [], [], sorted(self.locals.items()), body)

    def call_p(self) -> I.Procedure:
        self.locals = {}
        frm, to, amount, ok = I.Var("from"), I.Var("to"), I.Var("amount"), I.Var("ok")
        body: List[I.Stmt] = [
            I.Assume(_ne(sel(S, to, "type"), UNUSED)),
            I.If(I.Bin("<", sel(S, frm, "balance"), amount), [I.Assign(ok, I.Lit(False)), I.Return()]),
            I.If(I.Star(), [I.Assign(ok, I.Lit(False)), I.Return()]),
            I.Assign(sel(S, frm, "balance"), I.Bin("-", sel(S, frm, "balance"), amount)),
            I.Assign(sel(S, to, "balance"), I.Bin("+", sel(S, to, "balance"), amount)),
        ]
        if self.kind == "contract":
            calls = [self.invoke(f, self.enc.procedures[(self.contract.name, f.name)], to, MAIN, "re_")
                     for f in self.contract.interface]
            if calls:
                body.append(I.While(I.Star(), self.choice(calls)))
        else:
            body += self.frame(keep_main=False)
        body.append(I.Assign(ok, I.Lit(True)))
        return I.Procedure("callP", [("from", I.ADDRESS), ("to", I.ADDRESS), ("amount", I.UINT)],
                           [("ok", I.BOOL)], sorted(self.locals.items()), body)


def emit_program(program: A.Program, contract: str, kind: str = "contract",
                 function: Optional[str] = None) -> I.IvlProgram:
    """Full verification program for ``contract`` under the chosen harness."""
    enc = Encoding(program)
    if contract not in enc.info.contracts:
        raise EncodingError(f"unknown contract {contract!r}")
    c = enc.info.contracts[contract]
    if kind == "function":
        if function is None or all(f.name != function for f in c.interface):
            raise EncodingError(f"{function!r} is not an interface function of {contract}")
    elif kind != "contract":
        raise EncodingError(f"unknown harness kind {kind!r}")
    decls: List[I.Decl] = enc.prelude()
    for ct in program.contracts:
        if ct.constructor is None:
            decls.append(emit_procedure(enc, ct, _implicit_constructor(ct)))
        for f in ct.functions:
            decls.append(emit_procedure(enc, ct, f))
    h = HarnessEmitter(enc, c, kind, function)
    decls += [h.main(), h.call_p()]
    return I.IvlProgram(decls)
