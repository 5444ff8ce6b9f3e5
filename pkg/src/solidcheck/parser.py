"""Recursive-descent parser for 0.5-style Solidity restricted to the Solid subset.

Compound assignments, ``++``/``--``, ``for`` loops and declarations with
initialisers are desugared while parsing, so the resulting tree only uses the
Solid statement constructors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

from . import ast as A
from .errors import SyntaxError, UnsupportedFeature
from .lexer import Token, tokenize
from .types import (
    ADDRESS, BOOL, INT, UINT, ArrayType, ContractType, EnumType, MappingType,
    SolidType, StructType,
)

_UINT_NAMES = {"uint", "uint256"}
_INT_NAMES = {"int", "int256"}
_ELEMENTARY = _UINT_NAMES | _INT_NAMES | {"bool", "address"}
_UNSUPPORTED_TYPES = {"string", "bytes", "byte", "fixed", "ufixed", "var", "function"}
_LOCATIONS = {"memory", "storage", "calldata"}
_VISIBILITY = {"public", "external", "internal", "private"}
_MUTABILITY = {"view", "pure", "payable", "constant"}
_UNITS = {
    "wei": 1, "szabo": 10**12, "finney": 10**15, "ether": 10**18,
    "seconds": 1, "minutes": 60, "hours": 3600, "days": 86400, "weeks": 604800,
}
_BUILTINS = {
    ("msg", "sender"): "msg.sender",
    ("msg", "value"): "msg.value",
    ("tx", "origin"): "tx.origin",
    ("block", "timestamp"): "block.timestamp",
}
_COMPOUND = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%"}
_BINARY_LEVELS = [
    ["||"],
    ["&&"],
    ["==", "!="],
    ["<", ">", "<=", ">="],
    ["+", "-"],
    ["*", "/", "%"],
]


# Transient call shapes; they never escape the parser.
@dataclass
class _CallExpr(A.Expr):
    callee: A.Expr
    args: List[A.Expr]
    value: Optional[A.Expr] = None


@dataclass
class _NewExpr(A.Expr):
    target: SolidType
    args: List[A.Expr]
    value: Optional[A.Expr] = None


@dataclass
class _Names:
    contracts: Set[str] = field(default_factory=set)
    structs: Set[str] = field(default_factory=set)
    enums: Set[str] = field(default_factory=set)

    @property
    def all(self) -> Set[str]:
        return self.contracts | self.structs | self.enums


def _prescan(tokens: List[Token]) -> _Names:
    names = _Names()
    for prev, tok in zip(tokens, tokens[1:]):
        if tok.kind != "ident" or prev.kind != "ident":
            continue
        bucket = {"contract": names.contracts, "struct": names.structs, "enum": names.enums}.get(prev.text)
        if bucket is not None:
            bucket.add(tok.text)
    clash = (names.contracts & names.structs) | (names.contracts & names.enums) | (names.structs & names.enums)
    if clash:
        raise UnsupportedFeature(f"type name used for several declarations: {sorted(clash)[0]}")
    return names


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.pos = 0
        self.names = _prescan(self.toks)
        self.uses_verification = False

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(repr(text))
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error("identifier")
        return self.advance().text

    def error(self, expected: str):
        t = self.tok
        raise SyntaxError(t.line, t.col, expected, t.text or "end of input")

    def unsupported(self, construct: str, tok: Optional[Token] = None):
        t = tok or self.tok
        raise UnsupportedFeature(construct, t.line, t.col)

    def span(self, tok: Optional[Token] = None) -> A.Span:
        t = tok or self.tok
        return A.Span(t.line, t.col)

    # -- top level ------------------------------------------------------------

    def parse_program(self) -> A.Program:
        start = self.span()
        contracts: List[A.Contract] = []
        while self.tok.kind != "eof":
            if self.accept("pragma"):
                while not self.at(";"):
                    if self.tok.kind == "eof":
                        self.error("';'")
                    self.advance()
                self.expect(";")
            elif self.at("import"):
                self.parse_import()
            elif self.at("library"):
                self.parse_library()
            elif self.at("contract"):
                contracts.append(self.parse_contract())
            elif self.at("interface") or self.at("abstract"):
                self.unsupported(self.tok.text)
            else:
                self.error("contract definition")
        return A.Program(contracts, self.uses_verification, span=start)

    def parse_import(self):
        t = self.expect("import")
        if self.tok.kind != "string":
            self.unsupported("import form", t)
        path = self.advance().text[1:-1]
        if path.rsplit("/", 1)[-1] != "Verification.sol":
            self.unsupported(f"import of {path!r}", t)
        self.expect(";")
        self.uses_verification = True

    def parse_library(self):
        t = self.expect("library")
        name = self.ident()
        if name != "Verification":
            self.unsupported(f"library {name}", t)
        self.skip_braces()
        self.uses_verification = True

    def skip_braces(self):
        self.expect("{")
        depth = 1
        while depth:
            if self.tok.kind == "eof":
                self.error("'}'")
            if self.at("{"):
                depth += 1
            elif self.at("}"):
                depth -= 1
            self.advance()

    def parse_contract(self) -> A.Contract:
        start = self.span()
        self.expect("contract")
        name = self.ident()
        if self.at("is"):
            self.unsupported("inheritance")
        self.expect("{")
        types: list = []
        variables: List[A.StateVar] = []
        functions: List[A.Function] = []
        while not self.accept("}"):
            t = self.tok
            if t.kind == "eof":
                self.error("'}'")
            if self.at("enum"):
                types.append(self.parse_enum())
            elif self.at("struct"):
                types.append(self.parse_struct())
            elif self.at("function") or self.at("constructor"):
                functions.append(self.parse_function())
            elif t.text in ("event", "modifier", "using", "fallback", "receive", "error"):
                self.unsupported(t.text)
            else:
                variables.append(self.parse_state_var())
        return A.Contract(name, types, variables, functions, span=start)

    def parse_enum(self) -> A.EnumDef:
        start = self.span()
        self.expect("enum")
        name = self.ident()
        self.expect("{")
        values = [self.ident()]
        while self.accept(","):
            values.append(self.ident())
        self.expect("}")
        return A.EnumDef(name, values, span=start)

    def parse_struct(self) -> A.StructDef:
        start = self.span()
        self.expect("struct")
        name = self.ident()
        self.expect("{")
        members = []
        while not self.accept("}"):
            mspan = self.span()
            ty = self.parse_type()
            members.append(A.StateVar(self.ident(), ty, span=mspan))
            self.expect(";")
        return A.StructDef(name, members, span=start)

    def parse_state_var(self) -> A.StateVar:
        start = self.span()
        ty = self.parse_type()
        while self.tok.text in _VISIBILITY or self.tok.text == "constant":
            if self.tok.text == "constant":
                self.unsupported("constant state variable")
            self.advance()
        name = self.ident()
        if self.at("="):
            self.unsupported("state variable initialiser")
        self.expect(";")
        return A.StateVar(name, ty, span=start)

    def parse_function(self) -> A.Function:
        start = self.span()
        is_ctor = self.at("constructor")
        self.advance()
        if is_ctor:
            name = "constructor"
        else:
            if not self.tok.kind == "ident":
                self.unsupported("fallback function")
            name = self.ident()
        params = self.parse_params(allow_unnamed=False)
        visibility = None
        mutability = None
        returns: List[A.LocalVar] = []
        while not self.at("{"):
            t = self.tok
            if t.text in _VISIBILITY:
                visibility = t.text
                self.advance()
            elif t.text in _MUTABILITY:
                mutability = "view" if t.text == "constant" else t.text
                self.advance()
            elif t.text == "returns":
                self.advance()
                returns = self.parse_params(allow_unnamed=True)
            elif t.text == ";":
                self.unsupported("function without body")
            elif t.kind == "ident":
                self.unsupported("modifier")
            else:
                self.error("'{'")
        body = self.parse_block()
        if visibility is None:
            visibility = "public"
        return A.Function(name, visibility, params, returns, body, mutability, is_ctor, span=start)

    def parse_params(self, allow_unnamed: bool) -> List[A.LocalVar]:
        self.expect("(")
        out: List[A.LocalVar] = []
        if not self.at(")"):
            while True:
                out.append(self.parse_param(allow_unnamed))
                if not self.accept(","):
                    break
        self.expect(")")
        return out

    def parse_param(self, allow_unnamed: bool) -> A.LocalVar:
        start = self.span()
        ty = self.parse_type()
        loc = self.parse_location()
        if self.tok.kind == "ident" and self.tok.text not in ("returns",):
            name = self.ident()
        elif allow_unnamed:
            name = ""
        else:
            name = ""
        return A.LocalVar(name, ty, loc, span=start)

    def parse_location(self) -> Optional[str]:
        if self.tok.text in _LOCATIONS:
            loc = self.advance().text
            return "memory" if loc == "calldata" else loc
        return None

    # -- types ----------------------------------------------------------------

    def starts_type(self) -> bool:
        t = self.tok
        if t.kind != "ident":
            return False
        if t.text in _ELEMENTARY or t.text == "mapping":
            return True
        if t.text in _UNSUPPORTED_TYPES or _is_sized_int(t.text):
            return True
        return t.text in self.names.all

    def parse_type(self) -> SolidType:
        t = self.tok
        if t.kind != "ident":
            self.error("type")
        if t.text == "mapping":
            self.advance()
            self.expect("(")
            key = self.parse_type()
            self.expect("=>")
            value = self.parse_type()
            self.expect(")")
            ty: SolidType = MappingType(key, value)
        else:
            ty = self.parse_base_type()
        while self.at("[") :
            self.advance()
            if self.accept("]"):
                ty = ArrayType(ty)
            else:
                if self.tok.kind != "number":
                    self.unsupported("non-literal array size")
                size = _parse_number(self.advance().text)
                self.expect("]")
                ty = ArrayType(ty, size)
        return ty

    def parse_base_type(self) -> SolidType:
        t = self.advance()
        name = t.text
        if name in _UINT_NAMES:
            return UINT
        if name in _INT_NAMES:
            return INT
        if name == "bool":
            return BOOL
        if name == "address":
            self.accept("payable")
            return ADDRESS
        if name in _UNSUPPORTED_TYPES or _is_sized_int(name):
            self.unsupported(f"type {name}", t)
        if name in self.names.contracts:
            return ContractType(name)
        if name in self.names.structs:
            return StructType(name)
        if name in self.names.enums:
            return EnumType(name)
        raise SyntaxError(t.line, t.col, "type", name)

    # -- statements -----------------------------------------------------------

    def parse_block(self) -> List[A.Stmt]:
        self.expect("{")
        out: List[A.Stmt] = []
        while not self.accept("}"):
            if self.tok.kind == "eof":
                self.error("'}'")
            out.extend(self.parse_statement())
        return out

    def parse_body(self) -> List[A.Stmt]:
        if self.at("{"):
            return self.parse_block()
        return self.parse_statement()

    def parse_statement(self) -> List[A.Stmt]:
        t = self.tok
        sp = self.span()
        text = t.text if t.kind in ("ident", "op") else None
        if text == "{":
            return self.parse_block()
        if text == "if":
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_body()
            orelse: List[A.Stmt] = []
            if self.accept("else"):
                orelse = self.parse_body()
            return [A.If(cond, then, orelse, span=sp)]
        if text == "while":
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            return [A.While(cond, self.parse_body(), span=sp)]
        if text == "for":
            return self.parse_for()
        if text == "return":
            self.advance()
            exprs: List[A.Expr] = []
            if not self.at(";"):
                e = self.parse_expr()
                exprs = list(e.items) if isinstance(e, _Tuple) else [e]
            self.expect(";")
            return [A.Return(exprs, span=sp)]
        if text in ("break", "continue", "emit", "delete", "assembly", "throw", "selfdestruct", "do", "try"):
            self.unsupported(text)
        if text == "(" and self._tuple_declaration_ahead():
            return self.parse_tuple_declaration()
        if self.starts_type() and self._declaration_ahead():
            return self.parse_declaration()
        return self.parse_simple_statement()

    def _declaration_ahead(self) -> bool:
        t = self.tok
        nxt = self.peek()
        if t.text in self.names.all and nxt.text in (".", "("):
            return False
        if t.text == "address" and nxt.text == "(":
            return False
        if t.text in _ELEMENTARY and nxt.text == "(":
            return False
        return True

    def _tuple_declaration_ahead(self) -> bool:
        save = self.pos
        self.advance()
        try:
            return self.starts_type() and self._declaration_ahead()
        finally:
            self.pos = save

    def parse_for(self) -> List[A.Stmt]:
        sp = self.span()
        self.expect("for")
        self.expect("(")
        init: List[A.Stmt] = []
        if not self.accept(";"):
            init = self.parse_statement()
        cond: A.Expr = A.BoolLit(True, span=self.span())
        if not self.at(";"):
            cond = self.parse_expr()
        self.expect(";")
        post: List[A.Stmt] = []
        if not self.at(")"):
            post = self.parse_simple_statement(terminator=")")
        self.expect(")")
        body = self.parse_body()
        return init + [A.While(cond, body + post, span=sp)]

    def parse_declaration(self) -> List[A.Stmt]:
        sp = self.span()
        ty = self.parse_type()
        loc = self.parse_location()
        name = self.ident()
        decl = A.VarDecl(A.LocalVar(name, ty, loc, span=sp), span=sp)
        out: List[A.Stmt] = [decl]
        if self.accept("="):
            rhs = self.parse_expr()
            out.extend(self.make_assignment([A.Ident(name, span=sp)], rhs, sp))
        self.expect(";")
        return out

    def parse_tuple_declaration(self) -> List[A.Stmt]:
        sp = self.span()
        self.expect("(")
        decls: List[A.Stmt] = []
        lhs: List[Optional[A.Expr]] = []
        while not self.at(")"):
            if self.at(","):
                lhs.append(None)
            else:
                psp = self.span()
                ty = self.parse_type()
                loc = self.parse_location()
                name = self.ident()
                decls.append(A.VarDecl(A.LocalVar(name, ty, loc, span=psp), span=psp))
                lhs.append(A.Ident(name, span=psp))
            if not self.accept(","):
                break
            if self.at(")"):
                lhs.append(None)
        self.expect(")")
        self.expect("=")
        rhs = self.parse_expr()
        self.expect(";")
        return decls + self.make_assignment(lhs, rhs, sp)

    def parse_simple_statement(self, terminator: str = ";") -> List[A.Stmt]:
        sp = self.span()
        if self.at("++") or self.at("--"):
            op = "+" if self.advance().text == "++" else "-"
            target = self.parse_unary()
            self._end(terminator)
            return [A.Assign(target, A.BinOp(op, target, A.IntLit(1, span=sp), span=sp), span=sp)]
        e = self.parse_expr()
        if self.at("=") :
            self.advance()
            rhs = self.parse_expr()
            self._end(terminator)
            lhs = list(e.items) if isinstance(e, _Tuple) else [e]
            return self.make_assignment(lhs, rhs, sp)
        if self.tok.text in _COMPOUND:
            op = _COMPOUND[self.advance().text]
            rhs = self.parse_expr()
            self._end(terminator)
            _no_calls(rhs, self)
            return [A.Assign(e, A.BinOp(op, e, rhs, span=sp), span=sp)]
        if self.at("++") or self.at("--"):
            op = "+" if self.advance().text == "++" else "-"
            self._end(terminator)
            return [A.Assign(e, A.BinOp(op, e, A.IntLit(1, span=sp), span=sp), span=sp)]
        self._end(terminator)
        if isinstance(e, (_CallExpr, _NewExpr)):
            return self.make_call_statement([], e, sp)
        raise SyntaxError(sp.line, sp.col, "statement", "expression")

    def _end(self, terminator: str):
        if terminator == ";":
            self.expect(";")
        elif not self.at(terminator):
            self.error(repr(terminator))

    def make_assignment(self, lhs: List[Optional[A.Expr]], rhs: A.Expr, sp: A.Span) -> List[A.Stmt]:
        for x in lhs:
            if x is not None:
                _no_calls(x, self)
        if isinstance(rhs, (_CallExpr, _NewExpr)):
            return self.make_call_statement(lhs, rhs, sp)
        if len(lhs) != 1 or lhs[0] is None:
            raise SyntaxError(sp.line, sp.col, "single assignment target", "tuple")
        _no_calls(rhs, self)
        return [A.Assign(lhs[0], rhs, span=sp)]

    def make_call_statement(self, lhs: List[Optional[A.Expr]], call: A.Expr, sp: A.Span) -> List[A.Stmt]:
        def single() -> Optional[A.Expr]:
            if not lhs:
                return None
            if len(lhs) == 1:
                return lhs[0]
            if len(lhs) == 2 and lhs[1] is None:
                return lhs[0]  # (ok, ) = addr.call(...)
            raise SyntaxError(sp.line, sp.col, "single assignment target", "tuple")

        def no_lhs(what: str):
            if lhs:
                raise UnsupportedFeature(f"using the result of {what}", sp.line, sp.col)

        if call.value is not None:
            _no_calls(call.value, self)
        callee = getattr(call, "callee", None)
        builtin = isinstance(callee, A.Ident) and callee.name in ("require", "assert", "revert")
        low_level = isinstance(callee, A.Member) and callee.name == "call"
        if builtin or low_level:
            # message strings and call data are accepted and dropped
            checked = call.args[:1] if builtin and callee.name != "revert" else []
        else:
            checked = call.args
        for a in checked:
            _no_calls(a, self)

        if isinstance(call, _NewExpr):
            if isinstance(call.target, ContractType):
                return [A.CreateContract(single(), call.target.name, call.args, call.value, span=sp)]
            target = single()
            if target is None:
                raise UnsupportedFeature("allocation without target", sp.line, sp.col)
            if call.value is not None or len(call.args) > 1:
                raise SyntaxError(sp.line, sp.col, "allocation size", "arguments")
            if isinstance(call.target, StructType) and call.args:
                self.unsupported("struct constructor arguments")
            size = call.args[0] if call.args else None
            return [A.AllocMemory(target, call.target, size, span=sp)]

        callee = call.callee
        args = call.args
        if isinstance(callee, A.Ident):
            name = callee.name
            if name in ("require", "assert"):
                no_lhs(name)
                if not args or len(args) > 2:
                    raise SyntaxError(sp.line, sp.col, f"{name}(condition)", "arguments")
                cond = args[0]
                return [A.Require(cond, span=sp) if name == "require" else A.VAssert(cond, span=sp)]
            if name == "revert":
                no_lhs(name)
                return [A.Revert(span=sp)]
            if name in self.names.structs:
                self.unsupported("struct constructor")
            return [A.ContractCall(lhs, "", name, None, args, call.value, span=sp)]
        if isinstance(callee, A.Member):
            base, name = callee.base, callee.name
            if isinstance(base, A.Ident) and base.name == "Verification":
                no_lhs("a verification primitive")
                if len(args) != 1:
                    raise SyntaxError(sp.line, sp.col, "one argument", f"{len(args)} arguments")
                if name == "Assume":
                    return [A.VAssume(args[0], span=sp)]
                if name == "Assert":
                    return [A.VAssert(args[0], span=sp)]
                if name.startswith("CexPrint_"):
                    return [A.CexPrint(name[len("CexPrint_"):], args[0], span=sp)]
                raise UnsupportedFeature(f"Verification.{name}", sp.line, sp.col)
            if name == "transfer" and call.value is None:
                no_lhs("transfer")
                if len(args) != 1:
                    raise SyntaxError(sp.line, sp.col, "one argument", f"{len(args)} arguments")
                return [A.Transfer(A.Ident("this", span=sp), base, args[0], span=sp)]
            if name == "send" and call.value is None:
                if len(args) != 1:
                    raise SyntaxError(sp.line, sp.col, "one argument", f"{len(args)} arguments")
                return [A.Send(single(), A.Ident("this", span=sp), base, args[0], span=sp)]
            if name == "push" and call.value is None:
                no_lhs("push")
                if len(args) != 1:
                    self.unsupported("push without argument")
                return [A.Push(base, args[0], span=sp)]
            if name == "call":
                value = call.value if call.value is not None else A.IntLit(0, span=sp)
                return [A.Call(single(), base, value, span=sp)]
            if name in ("delegatecall", "staticcall", "selfdestruct"):
                self.unsupported(name)
            return [A.ContractCall(lhs, "", name, base, args, call.value, span=sp)]
        self.unsupported("call form")

    # -- expressions ----------------------------------------------------------

    def parse_expr(self) -> A.Expr:
        e = self.parse_binary(0)
        if self.at("?"):
            self.unsupported("conditional expression")
        return e

    def parse_binary(self, level: int) -> A.Expr:
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        left = self.parse_binary(level + 1)
        ops = _BINARY_LEVELS[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            sp = self.span()
            op = self.advance().text
            right = self.parse_binary(level + 1)
            left = A.BinOp(op, left, right, span=sp)
        if self.tok.kind == "op" and self.tok.text in ("&", "|", "^", "<<", ">>", "**", "~"):
            self.unsupported(f"operator {self.tok.text}")
        return left

    def parse_unary(self) -> A.Expr:
        sp = self.span()
        if self.at("!"):
            self.advance()
            return A.UnOp("!", self.parse_unary(), span=sp)
        if self.at("-"):
            self.advance()
            return A.UnOp("-", self.parse_unary(), span=sp)
        if self.at("~"):
            self.unsupported("operator ~")
        return self.parse_postfix()

    def parse_args(self) -> List[A.Expr]:
        self.expect("(")
        args: List[A.Expr] = []
        if not self.at(")"):
            while True:
                if self.at("{"):
                    self.unsupported("named arguments")
                args.append(self.parse_expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return args

    def parse_call_options(self) -> Optional[A.Expr]:
        self.expect("{")
        value = None
        while not self.at("}"):
            key = self.ident()
            self.expect(":")
            v = self.parse_expr()
            if key != "value":
                self.unsupported(f"call option {key}")
            value = v
            if not self.accept(","):
                break
        self.expect("}")
        return value

    def parse_postfix(self) -> A.Expr:
        e = self.parse_primary()
        while True:
            sp = self.span()
            if self.at("."):
                self.advance()
                name = self.ident()
                if name == "value" and self.at("(") and not isinstance(e, (_CallExpr,)):
                    # c.f.value(v)(args) and addr.call.value(v)(args)
                    value = self.parse_args()
                    if len(value) != 1:
                        raise SyntaxError(sp.line, sp.col, "one value argument", "arguments")
                    if self.at("{"):
                        self.unsupported("call options")
                    args = self.parse_args()
                    e = self._with_value(e, args, value[0], sp)
                    continue
                if name in ("gas",) and self.at("("):
                    self.unsupported("gas option")
                if isinstance(e, A.Ident) and (e.name, name) in _BUILTINS:
                    e = A.Builtin(_BUILTINS[(e.name, name)], span=e.span)
                elif isinstance(e, A.Ident) and e.name in ("msg", "tx", "block"):
                    self.unsupported(f"{e.name}.{name}")
                elif isinstance(e, A.Ident) and e.name in self.names.enums:
                    e = A.EnumLit(e.name, name, span=e.span)
                else:
                    e = A.Member(e, name, span=sp)
            elif self.at("["):
                self.advance()
                idx = self.parse_expr()
                self.expect("]")
                e = A.Index(e, idx, span=sp)
            elif self.at("{") and isinstance(e, (A.Member, A.Ident, _NewExpr)):
                value = self.parse_call_options()
                args = self.parse_args()
                e = self._with_value(e, args, value, sp)
            elif self.at("("):
                if isinstance(e, (_CallExpr, _NewExpr)):
                    self.unsupported("call on a call result")
                args = self.parse_args()
                e = _CallExpr(e, args, span=e.span)
            else:
                return e

    def _with_value(self, callee: A.Expr, args: List[A.Expr], value: Optional[A.Expr], sp) -> A.Expr:
        if isinstance(callee, _NewExpr):
            return _NewExpr(callee.target, args, value, span=callee.span)
        return _CallExpr(callee, args, value, span=callee.span)

    def parse_primary(self) -> A.Expr:
        t = self.tok
        sp = self.span()
        if t.kind == "number":
            self.advance()
            v = _parse_number(t.text)
            if self.tok.kind == "ident" and self.tok.text in _UNITS:
                v *= _UNITS[self.advance().text]
            return A.IntLit(v, span=sp)
        if t.kind == "string":
            self.advance()
            return _StrLit(t.text, span=sp)
        if t.text == "(":
            self.advance()
            if self.at(")"):
                self.unsupported("empty tuple")
            items: List[Optional[A.Expr]] = []
            first = None if self.at(",") else self.parse_expr()
            items.append(first)
            is_tuple = False
            while self.accept(","):
                is_tuple = True
                items.append(None if (self.at(",") or self.at(")")) else self.parse_expr())
            self.expect(")")
            if is_tuple:
                return _Tuple(items, span=sp)
            return first
        if t.kind != "ident":
            self.error("expression")
        name = t.text
        if name in ("true", "false"):
            self.advance()
            return A.BoolLit(name == "true", span=sp)
        if name == "now":
            self.advance()
            return A.Builtin("block.timestamp", span=sp)
        if name == "new":
            self.advance()
            ty = self.parse_type()
            if not self.at("(") and not self.at("{"):
                self.error("'('")
            if self.at("{"):
                value = self.parse_call_options()
                return _NewExpr(ty, self.parse_args(), value, span=sp)
            return _NewExpr(ty, self.parse_args(), span=sp)
        if name == "payable" and self.peek().text == "(":
            self.advance()
            args = self.parse_args()
            return self._conversion(ADDRESS, args, sp)
        if name in _ELEMENTARY or name in self.names.contracts:
            if self.peek().text == "(":
                ty = self.parse_base_type()
                args = self.parse_args()
                return self._conversion(ty, args, sp)
        if name in _UNSUPPORTED_TYPES or _is_sized_int(name):
            self.unsupported(f"type {name}")
        if name in ("type", "keccak256", "sha256", "ecrecover", "abi", "blockhash", "gasleft", "addmod", "mulmod"):
            self.unsupported(name)
        self.advance()
        return A.Ident(name, span=sp)

    def _conversion(self, ty: SolidType, args: List[A.Expr], sp) -> A.Expr:
        if len(args) != 1:
            raise SyntaxError(sp.line, sp.col, "one conversion argument", f"{len(args)} arguments")
        _no_calls(args[0], self)
        return A.Convert(ty, args[0], span=sp)


@dataclass
class _Tuple(A.Expr):
    items: List[Optional[A.Expr]]


@dataclass
class _StrLit(A.Expr):
    text: str


def _no_calls(e: A.Expr, parser: Parser):
    if isinstance(e, (_CallExpr, _NewExpr)):
        sp = e.span or A.Span(0, 0)
        raise UnsupportedFeature("function call inside an expression", sp.line, sp.col)
    if isinstance(e, _Tuple):
        sp = e.span or A.Span(0, 0)
        raise UnsupportedFeature("tuple expression", sp.line, sp.col)
    if isinstance(e, _StrLit):
        sp = e.span or A.Span(0, 0)
        raise UnsupportedFeature("string literal", sp.line, sp.col)
    for child in _children(e):
        _no_calls(child, parser)


def _children(e: A.Expr) -> Tuple[A.Expr, ...]:
    if isinstance(e, A.Member):
        return (e.base,)
    if isinstance(e, A.Index):
        return (e.base, e.index)
    if isinstance(e, A.BinOp):
        return (e.left, e.right)
    if isinstance(e, A.UnOp):
        return (e.operand,)
    if isinstance(e, A.Convert):
        return (e.expr,)
    return ()


def _is_sized_int(name: str) -> bool:
    for prefix in ("uint", "int", "bytes"):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return name not in _UINT_NAMES | _INT_NAMES
    return False


def _parse_number(text: str) -> int:
    text = text.replace("_", "")
    if text[:2].lower() == "0x":
        return int(text, 16)
    if "e" in text.lower():
        base, exp = text.lower().split("e")
        return int(base) * 10 ** int(exp)
    return int(text)


def parse_program(source: str) -> A.Program:
    return Parser(source).parse_program()
