"""Tokenizer for the Solidity subset."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

from .errors import SyntaxError


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | string | op | eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<linecomment>//[^\n]*)
  | (?P<blockcomment>/\*.*?\*/)
  | (?P<number>0[xX][0-9a-fA-F_]+|[0-9][0-9_]*(?:[eE][0-9]+)?)
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<op>=>|==|!=|<=|>=|&&|\|\||\+\+|--|\+=|-=|\*=|/=|%=|\*\*|<<|>>|[-+*/%<>=!(){}\[\];,.:?&|^~])
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    line, col = 1, 1
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise SyntaxError(line, col, "a token", source[pos])
        kind = m.lastgroup
        text = m.group(kind)
        if kind not in ("ws", "linecomment", "blockcomment"):
            tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens
