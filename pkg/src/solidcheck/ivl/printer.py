"""Concrete syntax for the verification program.

Two notations share one tree: ``boogie`` prints ASCII quantifiers and
implications the way Boogie tools read them, while ``math`` uses the
set-theoretic symbols common in published encodings (``∀ v : int • e``,
``⇒``).  Output is deterministic for a given tree.
"""

from __future__ import annotations

from typing import List

from . import ast as I

INDENT = "  "

# binding strength; larger binds tighter
_PREC = {"==>": 1, "||": 2, "&&": 3, "==": 4, "!=": 4, "<": 4, ">": 4, "<=": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "div": 6, "mod": 6}


class Printer:
    def __init__(self, notation: str = "boogie"):
        if notation not in ("boogie", "math"):
            raise ValueError(f"unknown notation {notation!r}")
        self.math = notation == "math"

    # types

    def type(self, t: I.IType, in_record: bool = False) -> str:
        if isinstance(t, I.Prim):
            return t.name
        if isinstance(t, I.Named):
            if t.kind in ("enum", "record") and in_record:
                return f"{t.kind}({t.name})"
            return t.name
        return f"[{self.type(t.dom, in_record)}] {self.type(t.rng, in_record)}"

    # expressions

    def expr(self, e: I.Expr, ctx: int = 0) -> str:
        if isinstance(e, I.Var):
            return e.name
        if isinstance(e, I.Lit):
            if isinstance(e.value, bool):
                return "true" if e.value else "false"
            return str(e.value) if e.value >= 0 else f"(0 - {-e.value})"
        if isinstance(e, I.Field):
            return f"{self.expr(e.base, 9)}.{e.name}"
        if isinstance(e, I.Select):
            return f"{self.expr(e.base, 9)}[{self.expr(e.index)}]"
        if isinstance(e, I.Un):
            return f"{e.op}{self.expr(e.operand, 8)}"
        if isinstance(e, I.Star):
            return "*"
        if isinstance(e, I.Ite):
            return f"(if {self.expr(e.cond)} then {self.expr(e.then)} else {self.expr(e.orelse)})"
        if isinstance(e, I.Forall):
            bound = ", ".join(f"{n} : {self.type(t)}" for n, t in e.bound)
            if self.math:
                text = f"∀ {bound} • {self.expr(e.body)}"
                return f"({text})" if ctx > 0 else text
            return f"(forall {bound} :: {self.expr(e.body)})"
        if isinstance(e, I.Bin):
            p = _PREC[e.op]
            op = "⇒" if (self.math and e.op == "==>") else e.op
            # ==> is right associative, comparisons do not chain, the rest is left associative
            if e.op == "==>":
                left, right = p + 1, p
            elif p == 4:
                left, right = p + 1, p + 1
            else:
                left, right = p, p + 1
            text = f"{self.expr(e.left, left)} {op} {self.expr(e.right, right)}"
            return f"({text})" if p < ctx else text
        raise TypeError(f"cannot print {e!r}")

    # statements

    def stmts(self, body: List[I.Stmt], depth: int) -> List[str]:
        out: List[str] = []
        for s in body:
            out += self.stmt(s, depth)
        return out

    def stmt(self, s: I.Stmt, depth: int = 0) -> List[str]:
        pad = INDENT * depth
        if isinstance(s, I.Assign):
            return [f"{pad}{self.expr(s.lhs)} := {self.expr(s.rhs)};"]
        if isinstance(s, I.Assume):
            return [f"{pad}assume {self.expr(s.cond)};"]
        if isinstance(s, I.Assert):
            return [f"{pad}assert {self.expr(s.cond)};"]
        if isinstance(s, I.Havoc):
            return [f"{pad}havoc {self.expr(s.target)};"]
        if isinstance(s, I.Return):
            return [f"{pad}return;"]
        if isinstance(s, I.Comment):
            return [f"{pad}// {s.text}"]
        if isinstance(s, I.CallStmt):
            args = ", ".join(self.expr(a) for a in s.args)
            if s.lhs:
                return [f"{pad}call {', '.join(self.expr(x) for x in s.lhs)} := {s.proc}({args});"]
            return [f"{pad}call {s.proc}({args});"]
        if isinstance(s, I.While):
            return ([f"{pad}while ({self.expr(s.cond)}) {{"] + self.stmts(s.body, depth + 1) + [f"{pad}}}"])
        if isinstance(s, I.If):
            out = [f"{pad}if ({self.expr(s.cond)}) {{"] + self.stmts(s.then, depth + 1)
            if s.orelse:
                out += [f"{pad}}} else {{"] + self.stmts(s.orelse, depth + 1)
            return out + [f"{pad}}}"]
        raise TypeError(f"cannot print {s!r}")

    # declarations

    def decl(self, d: I.Decl) -> List[str]:
        if isinstance(d, I.TypeSynonym):
            return [f"type {d.name} = {self.type(d.type)};"]
        if isinstance(d, I.EnumDecl):
            return [f"enum {d.name} = ({', '.join(d.values)});"]
        if isinstance(d, I.RecordDecl):
            fields = ", ".join(f"{n} : {self.type(t, True)}" for n, t in d.fields)
            return [f"record {d.name} = ({fields});"]
        if isinstance(d, I.ConstDecl):
            return [f"const unique {d.name} : {self.type(d.type)};"]
        if isinstance(d, I.GlobalVar):
            return [f"var {d.name} : {self.type(d.type)};"]
        if isinstance(d, I.Procedure):
            return self.procedure(d)
        raise TypeError(f"cannot print {d!r}")

    def procedure(self, p: I.Procedure) -> List[str]:
        params = ", ".join(f"{n} : {self.type(t)}" for n, t in p.params)
        head = f"procedure {p.name}({params})"
        if p.returns:
            head += " returns (" + ", ".join(f"{n} : {self.type(t)}" for n, t in p.returns) + ")"
        out = [head]
        if p.modifies:
            out.append(f"{INDENT}modifies {', '.join(p.modifies)};")
        out.append("{")
        out += [f"{INDENT}var {n} : {self.type(t)};" for n, t in p.locals]
        out += self.stmts(p.body, 1)
        return out + ["}"]

    def program(self, prog: I.IvlProgram) -> str:
        chunks: List[str] = []
        prev = None
        for d in prog.decls:
            kind = type(d)
            if prev is not None and (kind is I.Procedure or kind is not prev):
                chunks.append("")
            chunks += self.decl(d)
            prev = kind
        return "\n".join(chunks) + "\n"


def print_program(prog: I.IvlProgram, notation: str = "boogie") -> str:
    return Printer(notation).program(prog)


def print_stmts(body: List[I.Stmt], notation: str = "boogie") -> str:
    return "\n".join(Printer(notation).stmts(body, 0))
