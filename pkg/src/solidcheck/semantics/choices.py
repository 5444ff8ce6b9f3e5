"""Choice points of the semantics and a cursor that can pin them for replay."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

from ..errors import ReplayDivergence
from .values import UNKNOWN, EnumV, Ref


@dataclass(frozen=True)
class FreshAddress:
    addr: int


@dataclass(frozen=True)
class SendOutcome:
    ok: bool


@dataclass(frozen=True)
class TransferOutcome:
    ok: bool


@dataclass(frozen=True)
class CallTarget:
    function: str
    args: Tuple[Any, ...]


@dataclass(frozen=True)
class CallOutcome:
    ok: bool


@dataclass(frozen=True)
class HavocValue:
    site: Tuple[Any, ...]
    value: Any


@dataclass(frozen=True)
class Reenter:
    """A harness-driven re-entry into the main contract during a low-level call."""

    function: str
    args: Tuple[Any, ...]
    value: int


Choice = Any
_KINDS = {c.__name__: c for c in (FreshAddress, SendOutcome, TransferOutcome, CallTarget, CallOutcome,
                                   HavocValue, Reenter)}


class Cursor:
    """Either explores every option or follows a pinned choice sequence."""

    def __init__(self, pinned: Optional[Sequence[Choice]] = None):
        self.pinned = list(pinned) if pinned is not None else None
        self.pos = 0

    @property
    def replaying(self) -> bool:
        return self.pinned is not None

    def pick(self, options: List[Choice]) -> List[Choice]:
        if self.pinned is None:
            return options
        if self.pos >= len(self.pinned):
            raise ReplayDivergence(f"trace has no choice left; options were {options}", self.pos)
        want = self.pinned[self.pos]
        if want not in options:
            raise ReplayDivergence(f"pinned choice {want} is not among {options}", self.pos)
        self.pos += 1
        return [want]

    def finished(self) -> bool:
        return self.pinned is None or self.pos == len(self.pinned)


# -- JSON encoding ------------------------------------------------------------


def encode(v: Any) -> Any:
    if v is UNKNOWN:
        return {"unknown": True}
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return {"int": str(v)} if abs(v) >= 2**53 else v
    if isinstance(v, EnumV):
        return {"enum": v.enum, "index": v.index}
    if isinstance(v, Ref):
        return {"ref": v.space, "key": [encode(k) for k in v.key]}
    if isinstance(v, tuple):
        return {"tuple": [encode(x) for x in v]}
    kind = type(v).__name__
    if kind in _KINDS:
        return {"choice": kind, **{k: encode(getattr(v, k)) for k in v.__dataclass_fields__}}
    raise ValueError(f"cannot encode {v!r}")


def decode(j: Any) -> Any:
    if isinstance(j, dict):
        if "choice" in j:
            cls = _KINDS[j["choice"]]
            return cls(**{k: decode(j[k]) for k in cls.__dataclass_fields__})
        if "int" in j:
            return int(j["int"])
        if "unknown" in j:
            return UNKNOWN
        if "enum" in j:
            return EnumV(j["enum"], j["index"])
        if "ref" in j:
            return Ref(j["ref"], tuple(decode(k) for k in j["key"]))
        if "tuple" in j:
            return tuple(decode(x) for x in j["tuple"])
    return j


def describe(c: Choice) -> str:
    """Short human-readable rendering used in trace listings."""
    if isinstance(c, SendOutcome):
        return f"send={'ok' if c.ok else 'fail'}"
    if isinstance(c, TransferOutcome):
        return f"transfer={'ok' if c.ok else 'fail'}"
    if isinstance(c, CallOutcome):
        return f"call={'ok' if c.ok else 'revert'}"
    if isinstance(c, CallTarget):
        return f"callee={c.function}({', '.join(map(str, c.args))})"
    if isinstance(c, Reenter):
        return f"reenter {c.function}({', '.join(map(str, c.args))}) value={c.value}"
    if isinstance(c, FreshAddress):
        return f"new@{c.addr}"
    if isinstance(c, HavocValue):
        return f"{site_name(c.site)}={c.value!r}"
    return repr(c)


def site_name(site: Tuple[Any, ...]) -> str:
    kind = site[0]
    if kind == "time":
        return "block.timestamp"
    if kind == "balance":
        return f"balance[{site[1]}]"
    if kind == "cell":
        _, owner, ref, comp = site
        where = f"{owner}:{ref!r}"
        if not comp:
            return where
        if comp[0] == "field":
            return f"{where}.{comp[1]}"
        if comp[0] == "len":
            return f"{where}.length"
        return f"{where}[{comp[1]!r}]"
    return repr(site)
