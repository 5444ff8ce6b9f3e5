"""AST for the supported Solidity subset, which is also the Solid AST.

Node names follow the constructors of the Solid grammar.  Expressions carry
optional ``ty``/``loc`` annotations that the type checker fills in; spans,
annotations and pass tags are excluded from structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Union

from .types import LocationKind, SolidType, is_reference


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass
class Node:
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


# -- expressions ------------------------------------------------------------


@dataclass
class Expr(Node):
    ty: Optional[SolidType] = field(default=None, compare=False, repr=False, kw_only=True)
    loc: Optional[LocationKind] = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class Ident(Expr):
    name: str


@dataclass
class Member(Expr):
    base: Expr
    name: str


@dataclass
class Index(Expr):
    base: Expr
    index: Expr


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class EnumLit(Expr):
    enum: str
    member: str


@dataclass
class Builtin(Expr):
    """``msg.sender``, ``msg.value``, ``tx.origin`` or ``block.timestamp``."""

    name: str


@dataclass
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class UnOp(Expr):
    op: str
    operand: Expr


@dataclass
class Convert(Expr):
    target: SolidType
    expr: Expr


# -- statements -------------------------------------------------------------


@dataclass
class Stmt(Node):
    tags: frozenset = field(default=frozenset(), compare=False, repr=False, kw_only=True)


@dataclass
class LocalVar(Node):
    name: str
    type: SolidType
    location: Optional[str] = None  # "memory" | "storage" | None

    @property
    def is_pointer(self) -> bool:
        return is_reference(self.type)

    @property
    def kind(self) -> Optional[LocationKind]:
        if not is_reference(self.type):
            return None
        if self.location == "storage":
            return LocationKind.STORAGE_POINTER
        return LocationKind.MEMORY_POINTER


@dataclass
class While(Stmt):
    cond: Expr
    body: List[Stmt]


@dataclass
class If(Stmt):
    cond: Expr
    then: List[Stmt]
    orelse: List[Stmt] = field(default_factory=list)


@dataclass
class VarDecl(Stmt):
    var: LocalVar


@dataclass
class Assign(Stmt):
    lhs: Expr
    rhs: Expr
    # a Solid length write: changes the length only, never resets elements
    plain: bool = False


@dataclass
class AllocMemory(Stmt):
    lhs: Expr
    type: SolidType
    size: Optional[Expr] = None


@dataclass
class Revert(Stmt):
    pass


@dataclass
class Require(Stmt):
    cond: Expr


@dataclass
class Return(Stmt):
    exprs: List[Expr]


@dataclass
class ContractCall(Stmt):
    lhs: List[Optional[Expr]]
    contract: str
    func: str
    target: Optional[Expr]  # None: bare internal call on this
    args: List[Expr]
    value: Optional[Expr] = None


@dataclass
class CreateContract(Stmt):
    lhs: Optional[Expr]
    contract: str
    args: List[Expr]
    value: Optional[Expr] = None


@dataclass
class Transfer(Stmt):
    source: Expr
    dest: Expr
    value: Expr


@dataclass
class Send(Stmt):
    lhs: Optional[Expr]
    source: Expr
    dest: Expr
    value: Expr


@dataclass
class Call(Stmt):
    lhs: Optional[Expr]
    address: Expr
    value: Expr


@dataclass
class VAssume(Stmt):
    cond: Expr


@dataclass
class VAssert(Stmt):
    cond: Expr


@dataclass
class CexPrint(Stmt):
    name: str
    arg: Expr


@dataclass
class Push(Stmt):
    array: Expr
    value: Expr


Statement = Union[
    While, If, VarDecl, Assign, AllocMemory, Revert, Require, Return, ContractCall,
    CreateContract, Transfer, Send, Call, VAssume, VAssert, CexPrint, Push,
]


# -- declarations -----------------------------------------------------------


@dataclass
class StateVar(Node):
    name: str
    type: SolidType


@dataclass
class EnumDef(Node):
    name: str
    values: List[str]


@dataclass
class StructDef(Node):
    name: str
    members: List[StateVar]

    def member_type(self, name: str) -> SolidType:
        for m in self.members:
            if m.name == name:
                return m.type
        raise KeyError(name)


@dataclass
class Function(Node):
    name: str
    visibility: str
    params: List[LocalVar]
    returns: List[LocalVar]
    body: List[Stmt]
    mutability: Optional[str] = None  # payable | view | pure
    is_constructor: bool = False

    @property
    def payable(self) -> bool:
        return self.mutability == "payable"

    @property
    def is_interface(self) -> bool:
        return not self.is_constructor and self.visibility in ("public", "external")


@dataclass
class Contract(Node):
    name: str
    types: List[Union[EnumDef, StructDef]]
    variables: List[StateVar]
    functions: List[Function]

    @property
    def enums(self) -> List[EnumDef]:
        return [t for t in self.types if isinstance(t, EnumDef)]

    @property
    def structs(self) -> List[StructDef]:
        return [t for t in self.types if isinstance(t, StructDef)]

    def function(self, name: str) -> Function:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    @property
    def constructor(self) -> Optional[Function]:
        for f in self.functions:
            if f.is_constructor:
                return f
        return None

    @property
    def interface(self) -> List[Function]:
        return [f for f in self.functions if f.is_interface]


@dataclass
class Program(Node):
    contracts: List[Contract]
    uses_verification: bool = False

    def contract(self, name: str) -> Contract:
        for c in self.contracts:
            if c.name == name:
                return c
        raise KeyError(name)


# -- traversal helpers ------------------------------------------------------


def sub_expressions(e: Expr) -> Iterator[Expr]:
    """Yield ``e`` and all expressions below it, children first."""
    if isinstance(e, Member):
        yield from sub_expressions(e.base)
    elif isinstance(e, Index):
        yield from sub_expressions(e.base)
        yield from sub_expressions(e.index)
    elif isinstance(e, BinOp):
        yield from sub_expressions(e.left)
        yield from sub_expressions(e.right)
    elif isinstance(e, UnOp):
        yield from sub_expressions(e.operand)
    elif isinstance(e, Convert):
        yield from sub_expressions(e.expr)
    yield e


def statement_expressions(s: Stmt) -> List[Expr]:
    """Top-level expressions a statement evaluates itself (not its nested bodies)."""
    if isinstance(s, (While, If)):
        return [s.cond]
    if isinstance(s, Assign):
        return [s.lhs, s.rhs]
    if isinstance(s, AllocMemory):
        return [s.lhs] + ([s.size] if s.size is not None else [])
    if isinstance(s, (Require, VAssume, VAssert)):
        return [s.cond]
    if isinstance(s, Return):
        return list(s.exprs)
    if isinstance(s, ContractCall):
        out = [x for x in s.lhs if x is not None]
        if s.target is not None:
            out.append(s.target)
        out.extend(s.args)
        if s.value is not None:
            out.append(s.value)
        return out
    if isinstance(s, CreateContract):
        out = list(s.args)
        if s.lhs is not None:
            out.append(s.lhs)
        if s.value is not None:
            out.append(s.value)
        return out
    if isinstance(s, Transfer):
        return [s.source, s.dest, s.value]
    if isinstance(s, Send):
        return ([s.lhs] if s.lhs is not None else []) + [s.source, s.dest, s.value]
    if isinstance(s, Call):
        return ([s.lhs] if s.lhs is not None else []) + [s.address, s.value]
    if isinstance(s, CexPrint):
        return [s.arg]
    if isinstance(s, Push):
        return [s.array, s.value]
    return []


def walk_statements(body: List[Stmt]) -> Iterator[Stmt]:
    for s in body:
        yield s
        if isinstance(s, While):
            yield from walk_statements(s.body)
        elif isinstance(s, If):
            yield from walk_statements(s.then)
            yield from walk_statements(s.orelse)


def declared_locals(f: Function) -> List[LocalVar]:
    return [s.var for s in walk_statements(f.body) if isinstance(s, VarDecl)]
