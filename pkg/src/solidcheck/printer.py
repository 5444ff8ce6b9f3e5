"""Pretty-printer producing Solidity concrete syntax for (Solid) ASTs."""

from __future__ import annotations

from typing import List, Optional

from . import ast as A
from .types import SolidType

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, ">": 4, "<=": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}
_UNARY_PREC = 7
_ATOM_PREC = 8


def type_str(t: SolidType) -> str:
    return str(t)


def expr_str(e: A.Expr) -> str:
    return _expr(e)[0]


def _expr(e: A.Expr):
    """Return (text, precedence)."""
    if isinstance(e, A.Ident):
        return e.name, _ATOM_PREC
    if isinstance(e, A.IntLit):
        return str(e.value), _ATOM_PREC
    if isinstance(e, A.BoolLit):
        return ("true" if e.value else "false"), _ATOM_PREC
    if isinstance(e, A.EnumLit):
        return f"{e.enum}.{e.member}", _ATOM_PREC
    if isinstance(e, A.Builtin):
        return e.name, _ATOM_PREC
    if isinstance(e, A.Member):
        return f"{_wrap(e.base, _ATOM_PREC)}.{e.name}", _ATOM_PREC
    if isinstance(e, A.Index):
        return f"{_wrap(e.base, _ATOM_PREC)}[{expr_str(e.index)}]", _ATOM_PREC
    if isinstance(e, A.Convert):
        return f"{type_str(e.target)}({expr_str(e.expr)})", _ATOM_PREC
    if isinstance(e, A.UnOp):
        inner = _wrap(e.operand, _ATOM_PREC if isinstance(e.operand, A.UnOp) else _UNARY_PREC)
        return f"{e.op}{inner}", _UNARY_PREC
    if isinstance(e, A.BinOp):
        p = _PREC[e.op]
        left = _wrap(e.left, p)
        right = _wrap(e.right, p + 1)
        return f"{left} {e.op} {right}", p
    raise ValueError(f"cannot print expression {e!r}")


def _wrap(e: A.Expr, min_prec: int) -> str:
    text, p = _expr(e)
    return f"({text})" if p < min_prec else text


def _args(args: List[A.Expr]) -> str:
    return ", ".join(expr_str(a) for a in args)


def _lhs_prefix(lhs: List[Optional[A.Expr]]) -> str:
    if not lhs:
        return ""
    if len(lhs) == 1 and lhs[0] is not None:
        return expr_str(lhs[0]) + " = "
    return "(" + ", ".join("" if x is None else expr_str(x) for x in lhs) + ") = "


def _local_decl(v: A.LocalVar) -> str:
    parts = [type_str(v.type)]
    if v.location:
        parts.append(v.location)
    if v.name:
        parts.append(v.name)
    return " ".join(parts)


def _alloc_rhs(s: A.AllocMemory) -> str:
    size = "" if s.size is None else expr_str(s.size)
    return f"new {type_str(s.type)}({size})"


def _call_rhs(s: A.ContractCall) -> str:
    if s.target is None:
        head = s.func
    else:
        head = f"{_wrap(s.target, _ATOM_PREC)}.{s.func}"
    if s.value is not None:
        head += f".value({expr_str(s.value)})"
    return f"{head}({_args(s.args)})"


def _create_rhs(s: A.CreateContract) -> str:
    opts = "" if s.value is None else f"{{value: {expr_str(s.value)}}}"
    return f"new {s.contract}{opts}({_args(s.args)})"


def _lowlevel_rhs(s: A.Call) -> str:
    return f"{_wrap(s.address, _ATOM_PREC)}.call.value({expr_str(s.value)})(\"\")"


def _merged_decl(decl: A.VarDecl, nxt: Optional[A.Stmt]) -> Optional[str]:
    """Render `T x = rhs;` when the next statement initialises the declared name."""
    name = A.Ident(decl.var.name)
    head = _local_decl(decl.var)
    if isinstance(nxt, A.Assign) and not nxt.plain and nxt.lhs == name:
        return f"{head} = {expr_str(nxt.rhs)};"
    if isinstance(nxt, A.AllocMemory) and nxt.lhs == name:
        return f"{head} = {_alloc_rhs(nxt)};"
    if isinstance(nxt, A.CreateContract) and nxt.lhs == name:
        return f"{head} = {_create_rhs(nxt)};"
    if isinstance(nxt, A.ContractCall) and nxt.lhs == [name]:
        return f"{head} = {_call_rhs(nxt)};"
    if isinstance(nxt, A.Send) and nxt.lhs == name:
        return f"{head} = {_wrap(nxt.dest, _ATOM_PREC)}.send({expr_str(nxt.value)});"
    if isinstance(nxt, A.Call) and nxt.lhs == name:
        return f"({head}, ) = {_lowlevel_rhs(nxt)};"
    return None


def stmt_lines(s: A.Stmt, indent: int = 0) -> List[str]:
    pad = "    " * indent
    if isinstance(s, A.While):
        return [f"{pad}while ({expr_str(s.cond)}) {{"] + block_lines(s.body, indent + 1) + [pad + "}"]
    if isinstance(s, A.If):
        out = [f"{pad}if ({expr_str(s.cond)}) {{"] + block_lines(s.then, indent + 1)
        if s.orelse:
            out += [pad + "} else {"] + block_lines(s.orelse, indent + 1)
        return out + [pad + "}"]
    return [pad + _simple(s)]


def _simple(s: A.Stmt) -> str:
    if isinstance(s, A.VarDecl):
        return _local_decl(s.var) + ";"
    if isinstance(s, A.Assign):
        return f"{expr_str(s.lhs)} = {expr_str(s.rhs)};"
    if isinstance(s, A.AllocMemory):
        return f"{expr_str(s.lhs)} = {_alloc_rhs(s)};"
    if isinstance(s, A.Revert):
        return "revert();"
    if isinstance(s, A.Require):
        return f"require({expr_str(s.cond)});"
    if isinstance(s, A.Return):
        if not s.exprs:
            return "return;"
        if len(s.exprs) == 1:
            return f"return {expr_str(s.exprs[0])};"
        return f"return ({_args(s.exprs)});"
    if isinstance(s, A.ContractCall):
        return _lhs_prefix(s.lhs) + _call_rhs(s) + ";"
    if isinstance(s, A.CreateContract):
        return _lhs_prefix([s.lhs] if s.lhs is not None else []) + _create_rhs(s) + ";"
    if isinstance(s, A.Transfer):
        return f"{_wrap(s.dest, _ATOM_PREC)}.transfer({expr_str(s.value)});"
    if isinstance(s, A.Send):
        prefix = "" if s.lhs is None else expr_str(s.lhs) + " = "
        return f"{prefix}{_wrap(s.dest, _ATOM_PREC)}.send({expr_str(s.value)});"
    if isinstance(s, A.Call):
        prefix = "" if s.lhs is None else f"({expr_str(s.lhs)}, ) = "
        return prefix + _lowlevel_rhs(s) + ";"
    if isinstance(s, A.VAssume):
        return f"Verification.Assume({expr_str(s.cond)});"
    if isinstance(s, A.VAssert):
        return f"Verification.Assert({expr_str(s.cond)});"
    if isinstance(s, A.CexPrint):
        return f"Verification.CexPrint_{s.name}({expr_str(s.arg)});"
    if isinstance(s, A.Push):
        return f"{_wrap(s.array, _ATOM_PREC)}.push({expr_str(s.value)});"
    raise ValueError(f"cannot print statement {s!r}")


def block_lines(body: List[A.Stmt], indent: int) -> List[str]:
    out: List[str] = []
    i = 0
    while i < len(body):
        s = body[i]
        if isinstance(s, A.VarDecl) and i + 1 < len(body):
            merged = _merged_decl(s, body[i + 1])
            if merged is not None:
                out.append("    " * indent + merged)
                i += 2
                continue
        out.extend(stmt_lines(s, indent))
        i += 1
    return out


def function_lines(f: A.Function, indent: int = 1) -> List[str]:
    pad = "    " * indent
    params = ", ".join(_local_decl(p) for p in f.params)
    head = "constructor" if f.is_constructor else f"function {f.name}"
    quals = [f.visibility]
    if f.mutability:
        quals.append(f.mutability)
    sig = f"{head}({params}) {' '.join(quals)}"
    if f.returns:
        sig += " returns (" + ", ".join(_local_decl(r) for r in f.returns) + ")"
    return [f"{pad}{sig} {{"] + block_lines(f.body, indent + 1) + [pad + "}"]


def contract_lines(c: A.Contract) -> List[str]:
    out = [f"contract {c.name} {{"]
    sections: List[List[str]] = []
    for t in c.types:
        if isinstance(t, A.EnumDef):
            sections.append([f"    enum {t.name} {{ {', '.join(t.values)} }}"])
        else:
            lines = [f"    struct {t.name} {{"]
            lines += [f"        {type_str(m.type)} {m.name};" for m in t.members]
            sections.append(lines + ["    }"])
    if c.variables:
        sections.append([f"    {type_str(v.type)} {v.name};" for v in c.variables])
    for f in c.functions:
        sections.append(function_lines(f))
    for i, sec in enumerate(sections):
        if i:
            out.append("")
        out.extend(sec)
    out.append("}")
    return out


def print_program(p: A.Program) -> str:
    chunks: List[str] = []
    if p.uses_verification:
        chunks.append('import "./Verification.sol";')
    for c in p.contracts:
        chunks.append("\n".join(contract_lines(c)))
    return "\n\n".join(chunks) + "\n"


def print_statements(body: List[A.Stmt], indent: int = 0) -> str:
    return "\n".join(block_lines(body, indent)) + "\n"
