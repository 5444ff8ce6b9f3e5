"""Lowering of enums and records to integers and parallel maps.

Every access path ``root.f[i].g`` into a record-typed variable becomes an
indexed access of a flat variable ``root_f_g[i]``.  Record-valued operands
(whole-record havoc, assignment, equality, call arguments) expand to the
family of flat leaves below them.  The union record for cell values gains
leaves for direct mapping lookups (``at``), boolean array and mapping
elements (``data_bool``, ``at_bool``) and basic cells (``basic``,
``basic_bool``), selected by the annotated element type.  Enum constants
become ``const unique`` integers.  The result uses only plain Boogie syntax.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from . import ast as I
from .emit import EncodingError

VALUE_RECORD = "RefValue"
CELL_RECORD = "RefCell"
EXTRA_VALUE_LEAVES = (
    ("at", I.MapT(I.INT, I.INT)),
    ("at_bool", I.MapT(I.INT, I.BOOL)),
    ("data_bool", I.MapT(I.INT, I.BOOL)),
    ("basic", I.INT),
    ("basic_bool", I.BOOL),
)


def mangle_tag(tag: str) -> str:
    """Identifier for a reference-type tag such as ``mapping(address=>S[])``."""
    out = tag.replace("=>", "_to_").replace("[]", "_arr")
    out = re.sub(r"\[(\d+)\]", r"_arr\1", out)
    out = out.replace("(", "_").replace(")", "")
    return "T_" + re.sub(r"[^A-Za-z0-9_]", "_", out)


@dataclass
class Path:
    """A flattened access: root variable, selected record fields, map indices, static type."""

    root: str
    fields: Tuple[str, ...]
    indices: Tuple[I.Expr, ...]
    type: I.IType


class Desugarer:
    def __init__(self, prog: I.IvlProgram):
        self.prog = prog
        self.synonyms: Dict[str, I.IType] = {}
        self.records: Dict[str, List[Tuple[str, I.IType]]] = {}
        self.enums: Dict[str, List[str]] = {}
        self.rename: Dict[str, str] = {}
        self.globals: Dict[str, I.IType] = {}
        self.procs: Dict[str, I.Procedure] = {}
        for d in prog.decls:
            if isinstance(d, I.TypeSynonym):
                self.synonyms[d.name] = d.type
            elif isinstance(d, I.RecordDecl):
                fields = list(d.fields)
                if d.name == VALUE_RECORD:
                    fields += list(EXTRA_VALUE_LEAVES)
                self.records[d.name] = fields
            elif isinstance(d, I.EnumDecl):
                self.enums[d.name] = list(d.values)
                for v in d.values:
                    if not re.fullmatch(r"[A-Za-z_$][\w$']*", v):
                        self.rename[v] = mangle_tag(v)
            elif isinstance(d, I.GlobalVar):
                self.globals[d.name] = d.type
            elif isinstance(d, I.Procedure):
                self.procs[d.name] = d
        self.env: Dict[str, I.IType] = {}
        self.temps: List[Tuple[str, I.IType]] = []

    # types

    def resolve(self, t: I.IType) -> I.IType:
        """Strip synonyms that hide records; enums become int."""
        if isinstance(t, I.Named):
            if t.name in self.records:
                return I.record(t.name)
            if t.name in self.enums:
                return I.INT
            return t
        if isinstance(t, I.MapT):
            return I.MapT(self.resolve(t.dom), self.resolve(t.rng))
        return t

    def is_record(self, t: I.IType) -> bool:
        return isinstance(t, I.Named) and t.name in self.records

    def is_aggregate(self, t: I.IType) -> bool:
        t = self.resolve(t)
        if self.is_record(t):
            return True
        return isinstance(t, I.MapT) and self.is_aggregate(t.rng)

    def leaves(self, t: I.IType) -> List[Tuple[Tuple[str, ...], I.IType]]:
        """(field path, flat type) for every leaf of ``t``."""
        t = self.resolve(t)
        if self.is_record(t):
            out = []
            for name, ft in self.records[t.name]:
                out += [((name,) + p, lt) for p, lt in self.leaves(ft)]
            return out
        if isinstance(t, I.MapT) and self.is_aggregate(t.rng):
            return [(p, I.MapT(t.dom, lt)) for p, lt in self.leaves(t.rng)]
        return [((), t)]

    @staticmethod
    def flat_name(root: str, fields: Sequence[str]) -> str:
        return "_".join((root,) + tuple(fields))

    def flatten_decl(self, name: str, t: I.IType) -> List[Tuple[str, I.IType]]:
        return [(self.flat_name(name, p), lt) for p, lt in self.leaves(t)]

    def field_type(self, record: str, name: str) -> I.IType:
        for n, t in self.records[record]:
            if n == name:
                return t
        raise EncodingError(f"record {record} has no field {name}")

    # expressions

    def infer(self, e: I.Expr) -> I.IType:
        if isinstance(e, I.Lit):
            return I.BOOL if isinstance(e.value, bool) else I.INT
        if isinstance(e, I.Var):
            return self.resolve(self.env.get(e.name, I.INT))
        if isinstance(e, (I.Field, I.Select)):
            try:
                return self.path(e).type
            except EncodingError:
                return I.INT
        if isinstance(e, I.Un):
            return I.BOOL if e.op == "!" else I.INT
        if isinstance(e, I.Bin):
            return I.INT if e.op in ("+", "-", "*", "div", "mod") else I.BOOL
        if isinstance(e, I.Ite):
            return self.infer(e.then)
        return I.BOOL

    def path(self, e: I.Expr) -> Path:
        if isinstance(e, I.Var):
            if e.name not in self.env:
                raise EncodingError(f"{e.name} is not a variable")
            return Path(e.name, (), (), self.resolve(self.env[e.name]))
        if isinstance(e, I.Field):
            base = self.path(e.base)
            t = base.type
            if not self.is_record(t):
                raise EncodingError(f"field {e.name} selected from a non-record")
            if t.name == CELL_RECORD and e.name == "value" and e.ty is not None and not self.is_record(
                    self.resolve(e.ty)):
                leaf = "basic_bool" if self.resolve(e.ty) == I.BOOL else "basic"
                return Path(base.root, base.fields + ("value", leaf), base.indices, self.resolve(e.ty))
            return Path(base.root, base.fields + (e.name,), base.indices, self.resolve(self.field_type(t.name, e.name)))
        if isinstance(e, I.Select):
            boolean = e.ty is not None and self.resolve(e.ty) == I.BOOL
            if isinstance(e.base, I.Field) and e.base.name == "data" and boolean:
                base = self.path(e.base.base)
                base = Path(base.root, base.fields + ("data_bool",), base.indices, I.MapT(I.INT, I.BOOL))
            else:
                base = self.path(e.base)
            index = self.expr(e.index)
            if self.is_record(base.type) and base.type.name == VALUE_RECORD:
                # direct mapping lookup in a cell value
                leaf = "at_bool" if boolean else "at"
                if self.infer(e.index) == I.BOOL:
                    index = I.Ite(index, I.Lit(1), I.Lit(0))
                return Path(base.root, base.fields + (leaf,), base.indices + (index,),
                            I.BOOL if boolean else I.INT)
            if not isinstance(base.type, I.MapT):
                raise EncodingError("index applied to a non-map")
            return Path(base.root, base.fields, base.indices + (index,), self.resolve(base.type.rng))
        raise EncodingError(f"not an access path: {e!r}")

    def access(self, root: str, fields: Sequence[str], indices: Sequence[I.Expr]) -> I.Expr:
        out: I.Expr = I.Var(self.flat_name(root, fields))
        for ix in indices:
            out = I.Select(out, ix)
        return out

    def family(self, e: I.Expr) -> List[I.Expr]:
        """Flat expressions for an operand; several when it is record-valued."""
        if isinstance(e, (I.Var, I.Field, I.Select)) and self._is_path(e):
            p = self.path(e)
            if self.is_aggregate(p.type):
                return [self.access(p.root, p.fields + sub, p.indices) for sub, _ in self.leaves(p.type)]
            return [self.access(p.root, p.fields, p.indices)]
        return [self.expr(e)]

    def _is_path(self, e: I.Expr) -> bool:
        while isinstance(e, (I.Field, I.Select)):
            e = e.base
        return isinstance(e, I.Var) and e.name in self.env

    def expr(self, e: I.Expr) -> I.Expr:
        if isinstance(e, I.Var):
            if e.name in self.rename:
                return I.Var(self.rename[e.name])
            if e.name in self.env:
                fam = self.family(e)
                if len(fam) != 1:
                    raise EncodingError(f"record-valued {e.name} used as a scalar")
                return fam[0]
            return e
        if isinstance(e, (I.Field, I.Select)):
            fam = self.family(e)
            if len(fam) != 1:
                raise EncodingError("record-valued access used as a scalar")
            return fam[0]
        if isinstance(e, I.Un):
            return I.Un(e.op, self.expr(e.operand))
        if isinstance(e, I.Bin):
            if e.op in ("==", "!=") and self._aggregate_operand(e):
                pairs = [I.Bin(e.op, a, b) for a, b in zip(self.family(e.left), self.family(e.right))]
                return I.conj(pairs) if e.op == "==" else I.disj(pairs)
            return I.Bin(e.op, self.expr(e.left), self.expr(e.right))
        if isinstance(e, I.Ite):
            return I.Ite(self.expr(e.cond), self.expr(e.then), self.expr(e.orelse))
        if isinstance(e, I.Forall):
            saved = dict(self.env)
            for n, t in e.bound:
                self.env[n] = t
            body = self.expr(e.body)
            self.env = saved
            return I.Forall(tuple((n, self.resolve(t)) for n, t in e.bound), body)
        return e

    def _aggregate_operand(self, e: I.Bin) -> bool:
        for side in (e.left, e.right):
            if self._is_path(side) and self.is_aggregate(self.path(side).type):
                return True
        return False

    # statements

    def temp(self, t: I.IType) -> I.Var:
        name = f"$h{len(self.temps) + 1}"
        self.temps.append((name, t))
        return I.Var(name)

    def stmts(self, body: List[I.Stmt]) -> List[I.Stmt]:
        out: List[I.Stmt] = []
        for s in body:
            out += self.stmt(s)
        return out

    def stmt(self, s: I.Stmt) -> List[I.Stmt]:
        if isinstance(s, I.Assign):
            lhs, rhs = self.family(s.lhs), self.family(s.rhs)
            if len(lhs) != len(rhs):
                raise EncodingError("record assignment between different shapes")
            return [I.Assign(a, b) for a, b in zip(lhs, rhs)]
        if isinstance(s, I.Havoc):
            p = self.path(s.target)
            out: List[I.Stmt] = []
            leaves = self.leaves(p.type) if self.is_aggregate(p.type) else [((), p.type)]
            for sub, lt in leaves:
                target = self.access(p.root, p.fields + sub, p.indices)
                if p.indices:
                    tmp = self.temp(lt)
                    out += [I.Havoc(tmp), I.Assign(target, tmp)]
                else:
                    out.append(I.Havoc(target))
            return out
        if isinstance(s, I.Assume):
            return [I.Assume(self.expr(s.cond))]
        if isinstance(s, I.Assert):
            return [I.Assert(self.expr(s.cond))]
        if isinstance(s, I.If):
            return [I.If(self.expr(s.cond), self.stmts(s.then), self.stmts(s.orelse))]
        if isinstance(s, I.While):
            return [I.While(self.expr(s.cond), self.stmts(s.body))]
        if isinstance(s, I.CallStmt):
            args: List[I.Expr] = []
            for a in s.args:
                args += self.family(a)
            lhs: List[I.Expr] = []
            for x in s.lhs:
                lhs += self.family(x)
            return [I.CallStmt(lhs, s.proc, args)]
        return [s]

    def procedure(self, p: I.Procedure, modifies: List[str]) -> I.Procedure:
        self.env = dict(self.globals)
        self.temps = []
        for n, t in p.params + p.returns + p.locals:
            self.env[n] = t
        body = self.stmts(p.body)

        def flat(items):
            out = []
            for n, t in items:
                out += self.flatten_decl(n, t)
            return out

        return I.Procedure(p.name, flat(p.params), flat(p.returns), flat(p.locals) + self.temps, body, modifies)

    def run(self) -> I.IvlProgram:
        decls: List[I.Decl] = []
        flat_globals = []
        for n, t in self.globals.items():
            flat_globals += self.flatten_decl(n, t)
        modifies = [n for n, _ in flat_globals]
        for d in self.prog.decls:
            if isinstance(d, I.TypeSynonym):
                decls.append(d)
            elif isinstance(d, I.EnumDecl):
                decls += [I.ConstDecl(self.rename.get(v, v), I.INT) for v in d.values]
        taken = set()
        for d in decls:
            if isinstance(d, I.ConstDecl):
                if d.name in taken:
                    raise EncodingError(f"name collision after lowering: {d.name}")
                taken.add(d.name)
        decls += [I.GlobalVar(n, t) for n, t in flat_globals]
        for d in self.prog.decls:
            if isinstance(d, I.Procedure):
                decls.append(self.procedure(d, modifies))
        return I.IvlProgram(decls)


def desugar(prog: I.IvlProgram) -> I.IvlProgram:
    """Plain-Boogie version of ``prog`` (no enum or record declarations)."""
    return Desugarer(prog).run()
