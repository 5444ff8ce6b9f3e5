"""Syntax tree for the emitted verification program (a Boogie subset with enums and records)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union


# -- types ----------------------------------------------------------------------


@dataclass(frozen=True)
class Prim:
    """``int`` or ``bool``."""

    name: str


@dataclass(frozen=True)
class Named:
    """A type synonym (Ref, Address, UInt), a record or an enum, printed by name."""

    name: str
    kind: str = "synonym"  # synonym | record | enum


@dataclass(frozen=True)
class MapT:
    dom: "IType"
    rng: "IType"


IType = Union[Prim, Named, MapT]

INT = Prim("int")
BOOL = Prim("bool")
REF = Named("Ref")
ADDRESS = Named("Address")
UINT = Named("UInt")


def record(name: str) -> Named:
    return Named(name, "record")


def enum(name: str) -> Named:
    return Named(name, "enum")


# -- expressions ------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: Union[int, bool]


@dataclass(frozen=True)
class Field:
    """``base.name``; ``ty`` records the type of the selected value when the emitter knows it."""

    base: "Expr"
    name: str
    ty: Optional[IType] = field(default=None, compare=False)


@dataclass(frozen=True)
class Select:
    base: "Expr"
    index: "Expr"
    ty: Optional[IType] = field(default=None, compare=False)


@dataclass(frozen=True)
class Un:
    op: str  # ! | -
    operand: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Forall:
    bound: Tuple[Tuple[str, IType], ...]
    body: "Expr"


@dataclass(frozen=True)
class Ite:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"


@dataclass(frozen=True)
class Star:
    """Nondeterministic condition ``*`` (only as an if/while guard)."""


Expr = Union[Var, Lit, Field, Select, Un, Bin, Forall, Ite, Star]


def sel(base: Expr, *path, ty: Optional[IType] = None) -> Expr:
    """Build an access path: strings select fields, expressions index maps."""
    e = base
    for k, p in enumerate(path):
        last = k == len(path) - 1
        t = ty if last else None
        e = Field(e, p, t) if isinstance(p, str) else Select(e, p, t)
    return e


def conj(parts: List[Expr]) -> Expr:
    if not parts:
        return Lit(True)
    e = parts[0]
    for p in parts[1:]:
        e = Bin("&&", e, p)
    return e


def disj(parts: List[Expr]) -> Expr:
    if not parts:
        return Lit(False)
    e = parts[0]
    for p in parts[1:]:
        e = Bin("||", e, p)
    return e


def forall(bound, body: Expr) -> Expr:
    return Forall(tuple(bound), body) if bound else body


# -- statements -----------------------------------------------------------------------


@dataclass
class Assign:
    lhs: Expr
    rhs: Expr


@dataclass
class Assume:
    cond: Expr


@dataclass
class Assert:
    cond: Expr


@dataclass
class Havoc:
    target: Expr


@dataclass
class If:
    cond: Expr
    then: List["Stmt"]
    orelse: List["Stmt"] = field(default_factory=list)


@dataclass
class While:
    cond: Expr
    body: List["Stmt"]


@dataclass
class CallStmt:
    lhs: List[Expr]
    proc: str
    args: List[Expr]


@dataclass
class Return:
    pass


@dataclass
class Comment:
    text: str


Stmt = Union[Assign, Assume, Assert, Havoc, If, While, CallStmt, Return, Comment]


# -- declarations ------------------------------------------------------------------------


@dataclass
class TypeSynonym:
    name: str
    type: IType


@dataclass
class EnumDecl:
    name: str
    values: List[str]


@dataclass
class RecordDecl:
    name: str
    fields: List[Tuple[str, IType]]


@dataclass
class GlobalVar:
    name: str
    type: IType


@dataclass
class ConstDecl:
    """``const unique name : type;`` (used by the desugared output)."""

    name: str
    type: IType


@dataclass
class Procedure:
    name: str
    params: List[Tuple[str, IType]]
    returns: List[Tuple[str, IType]]
    locals: List[Tuple[str, IType]]
    body: List[Stmt]
    modifies: List[str] = field(default_factory=list)


Decl = Union[TypeSynonym, EnumDecl, RecordDecl, GlobalVar, ConstDecl, Procedure]


@dataclass
class IvlProgram:
    decls: List[Decl]

    def procedure(self, name: str) -> Procedure:
        for d in self.decls:
            if isinstance(d, Procedure) and d.name == name:
                return d
        raise KeyError(name)

    @property
    def procedures(self) -> List[Procedure]:
        return [d for d in self.decls if isinstance(d, Procedure)]
