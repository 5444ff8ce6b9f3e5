"""Runtime values of the Solid state model.

Integers, addresses and contract identifiers are plain Python ints, booleans
are bools.  Composite values live in reference cells and hold ``Ref`` values
for their reference-typed elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Tuple

from pyrsistent import PMap, pmap


class _Unknown:
    """A basic value that has been havoc'd but not yet observed."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNKNOWN"

    def __reduce__(self):
        return (_Unknown, ())


UNKNOWN = _Unknown()


class _PerKeyRefs:
    """Mapping default for reference-typed ranges: key k maps to the child ref (owner, k)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "PER_KEY"

    def __reduce__(self):
        return (_PerKeyRefs, ())


PER_KEY = _PerKeyRefs()


@dataclass(frozen=True)
class Ref:
    space: str  # "S" storage, "M" memory
    key: Tuple[Any, ...]

    def child(self, component: Any) -> "Ref":
        return Ref(self.space, self.key + (component,))

    def __repr__(self) -> str:
        return f"{self.space}{'/'.join(map(str, self.key))}"


@dataclass(frozen=True)
class EnumV:
    enum: str
    index: int

    def __repr__(self) -> str:
        return f"{self.enum}#{self.index}"


@dataclass(frozen=True)
class RecordV:
    names: Tuple[str, ...]
    values: Tuple[Any, ...]

    def get(self, name: str) -> Any:
        return self.values[self.names.index(name)]

    def set(self, name: str, value: Any) -> "RecordV":
        i = self.names.index(name)
        return RecordV(self.names, self.values[:i] + (value,) + self.values[i + 1:])


@dataclass(frozen=True)
class MappingV:
    """Total mapping: keys not in ``overrides`` map to ``default``."""

    default: Any
    overrides: PMap = pmap()

    def get(self, key: Any, owner: Ref) -> Any:
        if key in self.overrides:
            return self.overrides[key]
        if self.default is PER_KEY:
            return owner.child(key)
        return self.default

    def set(self, key: Any, value: Any, owner: Ref) -> "MappingV":
        implicit = owner.child(key) if self.default is PER_KEY else self.default
        if value == implicit and type(value) is type(implicit):
            return MappingV(self.default, self.overrides.discard(key))
        return MappingV(self.default, self.overrides.set(key, value))


@dataclass(frozen=True)
class ArrayRecV:
    length: Any
    data: MappingV

    def get(self, index: int, owner: Ref) -> Any:
        return self.data.get(index, owner)

    def set(self, index: int, value: Any, owner: Ref) -> "ArrayRecV":
        return ArrayRecV(self.length, self.data.set(index, value, owner))


@dataclass(frozen=True)
class RefCell:
    type: Any  # SolidType, or None when unallocated
    value: Any


UNALLOCATED = RefCell(None, None)


def contains_unknown(v: Any) -> bool:
    if v is UNKNOWN:
        return True
    if isinstance(v, RecordV):
        return any(contains_unknown(x) for x in v.values)
    if isinstance(v, ArrayRecV):
        return v.length is UNKNOWN or contains_unknown(v.data)
    if isinstance(v, MappingV):
        return v.default is UNKNOWN or any(contains_unknown(x) for x in v.overrides.values())
    return False


def to_json(v: Any) -> Any:
    """JSON-friendly rendering used by state dumps and traces."""
    if v is UNKNOWN:
        return "?"
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return v if abs(v) < 2**53 else str(v)
    if isinstance(v, Ref):
        return {"ref": repr(v)}
    if isinstance(v, EnumV):
        return {"enum": v.enum, "index": v.index}
    if isinstance(v, RecordV):
        return {n: to_json(x) for n, x in zip(v.names, v.values)}
    if isinstance(v, ArrayRecV):
        return {"length": to_json(v.length), "data": to_json(v.data)}
    if isinstance(v, MappingV):
        default = "per-key" if v.default is PER_KEY else to_json(v.default)
        items = sorted(v.overrides.items(), key=lambda kv: repr(kv[0]))
        return {"default": default, "entries": [[to_json(k), to_json(x)] for k, x in items]}
    return repr(v)
