"""Structural checker for emitted verification programs (ASCII notation).

Parses the Boogie subset with enum and record declarations and reports:
unbalanced blocks, undeclared identifiers and types, unknown record fields,
and calls whose argument or result counts do not match the callee.  Types of
expressions are not checked.  Reference-type tags such as ``uint[]`` or
``mapping(address=>Account)`` are lexed as single names once their enum
declaration has been seen.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Set, Tuple

KEYWORDS = {
    "type", "enum", "record", "var", "const", "unique", "procedure", "returns", "modifies", "assume", "assert",
    "havoc", "call", "if", "else", "while", "return", "forall", "then", "true", "false", "int", "bool",
    "div", "mod",
}
SYMBOLS = sorted([":=", "==>", "<==>", "==", "!=", "<=", ">=", "&&", "||", "::", "<", ">", "+", "-", "*", "!",
                  "(", ")", "[", "]", "{", "}", ";", ",", ":", "=", "."], key=len, reverse=True)
_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$'.#]*")
_IDENT_NODOT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$'#]*")
_NUMBER = re.compile(r"[0-9]+")
_ENUM_HEAD = re.compile(r"\benum\s+([A-Za-z_$][\w$']*)\s*=\s*\(")


class IvlCheckError(Exception):
    def __init__(self, problems: List[str]):
        self.problems = problems
        super().__init__("; ".join(problems[:5]))


@dataclass
class Tok:
    kind: str  # name | num | sym | eof
    text: str
    line: int


def _enum_tags(text: str) -> List[str]:
    """Values of every enum declaration that are not plain identifiers."""
    tags = []
    for mt in _ENUM_HEAD.finditer(text):
        depth, start, k = 0, mt.end(), mt.end()
        items = []
        while k < len(text):
            ch = text[k]
            if ch in "([":
                depth += 1
            elif ch in ")]":
                if depth == 0:
                    items.append(text[start:k])
                    break
                depth -= 1
            elif ch == "," and depth == 0:
                items.append(text[start:k])
                start = k + 1
            k += 1
        tags += [t.strip() for t in items if t.strip() and not _IDENT_NODOT.fullmatch(t.strip())]
    return sorted(set(tags), key=len, reverse=True)


def tokenize(text: str) -> List[Tok]:
    tags = _enum_tags(text)
    out: List[Tok] = []
    k, line = 0, 1
    n = len(text)
    while k < n:
        ch = text[k]
        if ch == "\n":
            line += 1
            k += 1
            continue
        if ch.isspace():
            k += 1
            continue
        if text.startswith("//", k):
            while k < n and text[k] != "\n":
                k += 1
            continue
        tag = next((t for t in tags if text.startswith(t, k)), None)
        if tag is not None and (k == 0 or not (text[k - 1].isalnum() or text[k - 1] in "_$")):
            out.append(Tok("name", tag, line))
            k += len(tag)
            continue
        mt = _IDENT_NODOT.match(text, k)
        if mt:
            out.append(Tok("name", mt.group(), line))
            k = mt.end()
            continue
        mt = _NUMBER.match(text, k)
        if mt:
            out.append(Tok("num", mt.group(), line))
            k = mt.end()
            continue
        sym = next((s for s in SYMBOLS if text.startswith(s, k)), None)
        if sym is None:
            raise IvlCheckError([f"line {line}: unexpected character {ch!r}"])
        out.append(Tok("sym", sym, line))
        k += len(sym)
    out.append(Tok("eof", "", line))
    return out


@dataclass
class Signature:
    params: int
    returns: int


class Checker:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.k = 0
        self.problems: List[str] = []
        self.types: Set[str] = set()
        self.records: Dict[str, List[str]] = {}
        self.constants: Set[str] = set()
        self.globals: Set[str] = set()
        self.procs: Dict[str, Signature] = {}
        self.scope: List[Set[str]] = []
        self.resolve = False  # second pass: names are checked

    # token helpers

    @property
    def tok(self) -> Tok:
        return self.toks[self.k]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "name") and self.tok.text == text

    def take(self) -> Tok:
        t = self.tok
        self.k += 1
        return t

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            raise IvlCheckError(self.problems + [f"line {self.tok.line}: expected {text!r}, found {self.tok.text!r}"])
        return self.take()

    def name(self) -> Tok:
        if self.tok.kind != "name" or self.tok.text in KEYWORDS:
            raise IvlCheckError(self.problems + [f"line {self.tok.line}: expected a name, found {self.tok.text!r}"])
        return self.take()

    def problem(self, line: int, msg: str) -> None:
        if self.resolve:
            self.problems.append(f"line {line}: {msg}")

    # entry

    def run(self) -> List[str]:
        for resolve in (False, True):
            self.k = 0
            self.resolve = resolve
            while self.tok.kind != "eof":
                self.decl()
        return self.problems

    def decl(self) -> None:
        t = self.tok
        if self.at("type"):
            self.take()
            n = self.name()
            self.types.add(n.text)
            self.expect("=")
            self.type()
            self.expect(";")
        elif self.at("enum"):
            self.take()
            n = self.name()
            self.types.add(n.text)
            self.expect("=")
            self.expect("(")
            while not self.at(")"):
                v = self.name()
                if self.resolve and v.text in self.globals:
                    self.problem(v.line, f"{v.text} declared twice")
                self.constants.add(v.text)
                if not self.at(")"):
                    self.expect(",")
            self.expect(")")
            self.expect(";")
        elif self.at("record"):
            self.take()
            n = self.name()
            self.types.add(n.text)
            self.expect("=")
            self.expect("(")
            fields = []
            while True:
                fields.append(self.field_name().text)
                self.expect(":")
                self.type()
                if not self.at(","):
                    break
                self.take()
            self.expect(")")
            self.expect(";")
            if len(set(fields)) != len(fields):
                self.problem(n.line, f"record {n.text} repeats a field")
            self.records[n.text] = fields
        elif self.at("const"):
            self.take()
            if self.at("unique"):
                self.take()
            n = self.name()
            self.constants.add(n.text)
            self.expect(":")
            self.type()
            self.expect(";")
        elif self.at("var"):
            self.take()
            n = self.name()
            if not self.resolve and n.text in self.globals:
                self.problems.append(f"line {n.line}: global {n.text} declared twice")
            self.globals.add(n.text)
            self.expect(":")
            self.type()
            self.expect(";")
        elif self.at("procedure"):
            self.procedure()
        else:
            raise IvlCheckError(self.problems + [f"line {t.line}: unexpected {t.text!r} at top level"])

    def field_name(self) -> Tok:
        # record fields may reuse keywords such as ``type``
        if self.tok.kind != "name":
            raise IvlCheckError(self.problems + [f"line {self.tok.line}: expected a field name"])
        return self.take()

    def type(self) -> None:
        if self.at("int") or self.at("bool"):
            self.take()
        elif self.at("["):
            self.take()
            self.type()
            while self.at(","):
                self.take()
                self.type()
            self.expect("]")
            self.type()
        elif self.at("enum") or self.at("record"):
            self.take()
            self.expect("(")
            n = self.name()
            self.expect(")")
            self.check_type_name(n)
        else:
            self.check_type_name(self.name())

    def check_type_name(self, n: Tok) -> None:
        if n.text not in self.types:
            self.problem(n.line, f"undeclared type {n.text}")

    def procedure(self) -> None:
        self.expect("procedure")
        n = self.name()
        params = self.binders()
        returns: List[str] = []
        if self.at("returns"):
            self.take()
            returns = self.binders()
        if not self.resolve:
            if n.text in self.procs:
                self.problems.append(f"line {n.line}: procedure {n.text} declared twice")
            self.procs[n.text] = Signature(len(params), len(returns))
        if self.at("modifies"):
            self.take()
            while True:
                g = self.name()
                if g.text not in self.globals:
                    self.problem(g.line, f"modifies undeclared global {g.text}")
                if not self.at(","):
                    break
                self.take()
            self.expect(";")
        names = set(params) | set(returns)
        if len(names) != len(params) + len(returns):
            self.problem(n.line, f"procedure {n.text} repeats a parameter name")
        self.scope = [names]
        self.expect("{")
        while self.at("var"):
            self.take()
            v = self.name()
            if v.text in self.scope[0]:
                self.problem(v.line, f"local {v.text} declared twice")
            self.scope[0].add(v.text)
            self.expect(":")
            self.type()
            self.expect(";")
        self.block_body()
        self.scope = []

    def binders(self) -> List[str]:
        self.expect("(")
        out = []
        while not self.at(")"):
            out.append(self.name().text)
            self.expect(":")
            self.type()
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        return out

    # statements

    def block_body(self) -> None:
        """Statements up to and including the closing brace."""
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise IvlCheckError(self.problems + [f"line {self.tok.line}: unbalanced block, missing '}}'"])
            self.stmt()
        self.take()

    def block(self) -> None:
        self.expect("{")
        self.block_body()

    def guard(self) -> None:
        self.expect("(")
        if self.at("*"):
            self.take()
        else:
            self.expr()
        self.expect(")")

    def stmt(self) -> None:
        if self.at("assume") or self.at("assert"):
            self.take()
            self.expr()
            self.expect(";")
        elif self.at("havoc"):
            self.take()
            self.lvalue()
            while self.at(","):
                self.take()
                self.lvalue()
            self.expect(";")
        elif self.at("return"):
            self.take()
            self.expect(";")
        elif self.at("if"):
            self.take()
            self.guard()
            self.block()
            if self.at("else"):
                self.take()
                if self.at("if"):
                    self.stmt()
                else:
                    self.block()
        elif self.at("while"):
            self.take()
            self.guard()
            self.block()
        elif self.at("call"):
            self.call()
        elif self.at("{"):
            raise IvlCheckError(self.problems + [f"line {self.tok.line}: unexpected block"])
        else:
            self.lvalue()
            self.expect(":=")
            self.expr()
            self.expect(";")

    def call(self) -> None:
        line = self.take().line
        outs = 0
        # lookahead for ``x, y := P(...)``
        j = self.k
        while self.toks[j].kind == "name" or self.toks[j].text in (",", "[", "]", "."):
            j += 1
        if self.toks[j].text == ":=":
            while True:
                self.lvalue()
                outs += 1
                if not self.at(","):
                    break
                self.take()
            self.expect(":=")
        p = self.name()
        self.expect("(")
        args = 0
        while not self.at(")"):
            self.expr()
            args += 1
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        self.expect(";")
        sig = self.procs.get(p.text)
        if sig is None:
            self.problem(line, f"call to undeclared procedure {p.text}")
        else:
            if sig.params != args:
                self.problem(line, f"{p.text} takes {sig.params} arguments, {args} given")
            if sig.returns != outs:
                self.problem(line, f"{p.text} returns {sig.returns} values, {outs} assigned")

    def lvalue(self) -> None:
        n = self.name()
        self.use(n)
        self.postfix()

    # expressions

    def use(self, n: Tok) -> None:
        if not self.resolve:
            return
        if any(n.text in s for s in self.scope) or n.text in self.globals or n.text in self.constants:
            return
        self.problem(n.line, f"undeclared identifier {n.text}")

    def postfix(self) -> None:
        while True:
            if self.at("."):
                self.take()
                f = self.field_name()
                if self.resolve and not any(f.text in fs for fs in self.records.values()):
                    self.problem(f.line, f"unknown field {f.text}")
            elif self.at("["):
                self.take()
                self.expr()
                while self.at(","):
                    self.take()
                    self.expr()
                self.expect("]")
            else:
                return

    _LEVELS: Tuple[Tuple[str, ...], ...] = (
        ("<==>",), ("==>",), ("||",), ("&&",), ("==", "!=", "<", ">", "<=", ">="), ("+", "-"), ("*", "div", "mod"),
    )

    def expr(self, level: int = 0) -> None:
        if level == len(self._LEVELS):
            self.unary()
            return
        self.expr(level + 1)
        ops = self._LEVELS[level]
        if ops == ("==>",):
            if self.tok.text == "==>":
                self.take()
                self.expr(level)  # right associative
            return
        comparison = level == 4
        while self.tok.text in ops and self.tok.kind in ("sym", "name"):
            self.take()
            self.expr(level + 1)
            if comparison and self.tok.text in ops:
                self.problem(self.tok.line, "chained comparison")

    def unary(self) -> None:
        if self.at("!") or self.at("-"):
            self.take()
            self.unary()
            return
        self.primary()
        self.postfix()

    def primary(self) -> None:
        t = self.tok
        if t.kind == "num" or self.at("true") or self.at("false"):
            self.take()
        elif self.at("("):
            self.take()
            if self.at("forall"):
                self.take()
                bound = set()
                while True:
                    bound.add(self.name().text)
                    self.expect(":")
                    self.type()
                    if not self.at(","):
                        break
                    self.take()
                self.expect("::")
                self.scope.append(bound)
                self.expr()
                self.scope.pop()
            elif self.at("if"):
                self.take()
                self.expr()
                self.expect("then")
                self.expr()
                self.expect("else")
                self.expr()
            else:
                self.expr()
            self.expect(")")
        elif t.kind == "name" and t.text not in KEYWORDS:
            self.use(self.take())
        else:
            raise IvlCheckError(self.problems + [f"line {t.line}: unexpected {t.text!r} in expression"])


def check_ivl(text: str) -> List[str]:
    """Problems found in ``text``; empty when it is well formed."""
    try:
        return Checker(text).run()
    except IvlCheckError as exc:
        return exc.problems


def assert_well_formed(text: str) -> None:
    problems = check_ivl(text)
    if problems:
        raise IvlCheckError(problems)
