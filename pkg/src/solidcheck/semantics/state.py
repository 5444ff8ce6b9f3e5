"""Blockchain and execution states, reference-cell trees and their allocation.

Reference-typed children of a composite value are addressed by refs derived
from the parent ref (parent key plus member name, index or mapping key).  Only
cells that differ from their implicit value are materialised in a reference
map; all others are computed on demand from the type of the path that leads
to them.  Derived keys extend their parent's key, so two distinct elements can
never share a cell.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple

from pyrsistent import PMap, pmap

from .. import ast as A
from ..typecheck import ProgramInfo
from ..types import (
    AddressType, ArrayType, BoolType, ContractType, EnumType, IntType, MappingType,
    SolidType, StructType, UIntType, is_reference,
)
from .values import PER_KEY, UNKNOWN, ArrayRecV, EnumV, MappingV, RecordV, Ref, RefCell

UNUSED = "Unused"
SIMPLE = "SimpleAddress"


@dataclass(frozen=True)
class AddressCell:
    type: str  # Unused | SimpleAddress | contract name
    balance: Any
    members: PMap = pmap()  # member name -> Ref
    storage: PMap = pmap()  # Ref -> RefCell (materialised cells only)
    havoc: bool = False  # unmaterialised cells hold unknown basic values


UNUSED_CELL = AddressCell(UNUSED, 0)


@dataclass(frozen=True)
class ChainState:
    s: PMap = pmap()  # address -> AddressCell, Unused addresses omitted
    time: Any = 0

    def cell(self, addr: int) -> AddressCell:
        return self.s.get(addr, UNUSED_CELL)


class Terminal:
    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return f"<{self.name}>"

    def __reduce__(self):
        return (_terminal, (self.name,))


def _terminal(name: str) -> "Terminal":
    return {"fail": FAIL, "error": ERROR, "budget": BUDGET}[name]


FAIL = Terminal("fail")
ERROR = Terminal("error")
BUDGET = Terminal("budget")
COMPLETE: Tuple = ()


@dataclass(frozen=True)
class ExecState:
    s: PMap
    time: Any
    origin: int
    m: PMap
    l: PMap
    c: Any  # tuple of statements, or a Terminal
    function: Optional[A.Function] = None
    steps: int = 0
    next_alloc: int = 0
    log: Tuple = ()
    site: Optional[Tuple] = None
    depth: int = 0
    reentry: int = 0  # nesting of harness-driven re-entries

    @property
    def this(self) -> int:
        return self.l["this"]

    @property
    def terminal(self) -> bool:
        return isinstance(self.c, Terminal) or not self.c

    def chain(self) -> ChainState:
        return ChainState(self.s, self.time)

    def addr(self, a: int) -> AddressCell:
        return self.s.get(a, UNUSED_CELL)

    def with_addr(self, a: int, cell: AddressCell) -> "ExecState":
        return replace(self, s=set_address(self.s, a, cell))


def set_address(s: PMap, a: int, cell: AddressCell) -> PMap:
    if cell == UNUSED_CELL:
        return s.discard(a)
    return s.set(a, cell)


# -- types along ref paths ----------------------------------------------------


def child_type(info: ProgramInfo, t: SolidType, component: Any) -> SolidType:
    if isinstance(t, StructType):
        for m in info.struct_members(t):
            if m.name == component:
                return m.type
        raise KeyError(component)
    if isinstance(t, ArrayType):
        return t.elem
    if isinstance(t, MappingType):
        return t.value
    raise KeyError(component)


def default_value(info: ProgramInfo, t: SolidType, ref: Optional[Ref] = None, unknown: bool = False) -> Any:
    """Implicit content of a freshly allocated cell of type ``t`` rooted at ``ref``."""
    leaf = UNKNOWN if unknown else None
    if isinstance(t, UIntType) or isinstance(t, IntType):
        return leaf if unknown else 0
    if isinstance(t, BoolType):
        return leaf if unknown else False
    if isinstance(t, (AddressType, ContractType)):
        return leaf if unknown else 0
    if isinstance(t, EnumType):
        return leaf if unknown else EnumV(t.name, 0)
    if isinstance(t, StructType):
        members = info.struct_members(t)
        values = []
        for m in members:
            if is_reference(m.type):
                values.append(ref.child(m.name))
            else:
                values.append(default_value(info, m.type, None, unknown))
        return RecordV(tuple(m.name for m in members), tuple(values))
    if isinstance(t, ArrayType):
        data = MappingV(PER_KEY if is_reference(t.elem) else default_value(info, t.elem, None, unknown))
        if t.size is not None:
            return ArrayRecV(t.size, data)
        return ArrayRecV(UNKNOWN if unknown else 0, data)
    if isinstance(t, MappingType):
        return MappingV(PER_KEY if is_reference(t.value) else default_value(info, t.value, None, unknown))
    raise ValueError(f"no default for {t}")


def zero_value(info: ProgramInfo, t: SolidType) -> Any:
    """Default value of a basic type (used for locals and placeholders)."""
    return default_value(info, t)


# -- storage trees ------------------------------------------------------------


def init_s(info: ProgramInfo, s: PMap, addr: int, contract: str) -> PMap:
    """Deploy a default-initialised instance of ``contract`` at ``addr``."""
    c = info.contracts[contract]
    members = {}
    storage = {}
    for v in c.variables:
        ref = Ref("S", (v.name,))
        members[v.name] = ref
        storage[ref] = RefCell(v.type, default_value(info, v.type, ref))
    cell = AddressCell(contract, 0, pmap(members), pmap(storage), False)
    return set_address(s, addr, cell)


def storage_root_type(info: ProgramInfo, contract: str, name: str) -> SolidType:
    for v in info.contracts[contract].variables:
        if v.name == name:
            return v.type
    raise KeyError(name)


@dataclass
class RefMap:
    """View over one reference mapping (an address's storage, or memory)."""

    info: ProgramInfo
    cells: PMap
    contract: Optional[str] = None  # set for storage
    havoc: bool = False

    def root_type(self, ref: Ref) -> Optional[SolidType]:
        if ref.space == "S":
            if self.contract is None:
                return None
            try:
                return storage_root_type(self.info, self.contract, ref.key[0])
            except KeyError:
                return None
        root = self.cells.get(Ref("M", ref.key[:1]))
        return None if root is None else root.type

    def type_of(self, ref: Ref) -> Optional[SolidType]:
        cell = self.cells.get(ref)
        if cell is not None:
            return cell.type
        t = self.root_type(ref)
        if t is None:
            return None
        try:
            for comp in ref.key[1:]:
                t = child_type(self.info, t, comp)
        except KeyError:
            return None
        return t

    def implicit(self, ref: Ref) -> RefCell:
        t = self.type_of(ref)
        if t is None or len(ref.key) == 1:
            return RefCell(None, None)
        return RefCell(t, default_value(self.info, t, ref, self.havoc))

    def read(self, ref: Ref) -> RefCell:
        cell = self.cells.get(ref)
        if cell is not None:
            return cell
        return self.implicit(ref)

    def write(self, ref: Ref, cell: RefCell) -> PMap:
        if len(ref.key) > 1 and cell == self.implicit(ref):
            return self.cells.discard(ref)
        return self.cells.set(ref, cell)


def storage_map(info: ProgramInfo, cell: AddressCell) -> RefMap:
    contract = cell.type if cell.type in info.contracts else None
    return RefMap(info, cell.storage, contract, cell.havoc)


def memory_map(info: ProgramInfo, m: PMap) -> RefMap:
    return RefMap(info, m)


def unallocated(m: PMap, ref: Ref) -> bool:
    """True iff no cell of the tree rooted at ``ref`` has been allocated."""
    n = len(ref.key)
    return all(r.key[:n] != ref.key for r in m.keys())


def alloc(info: ProgramInfo, m: PMap, ref: Ref, t: SolidType) -> PMap:
    """Allocate a default-valued tree of type ``t`` rooted at ``ref``."""
    return m.set(ref, RefCell(t, default_value(info, t, ref)))


def zero_m() -> PMap:
    return pmap()


def havoc_storage(info: ProgramInfo, cell: AddressCell) -> AddressCell:
    """Turn every basic leaf of an address's storage into UNKNOWN; refs stay fixed."""
    storage = {}
    for ref, rc in cell.storage.items():
        storage[ref] = RefCell(rc.type, _havoc_value(info, rc.type, rc.value, ref))
    return replace(cell, storage=pmap(storage), havoc=True)


def _havoc_value(info: ProgramInfo, t: SolidType, v: Any, ref: Ref) -> Any:
    if isinstance(t, StructType):
        vals = []
        for m, x in zip(info.struct_members(t), v.values):
            vals.append(x if is_reference(m.type) else UNKNOWN)
        return RecordV(v.names, tuple(vals))
    if isinstance(t, ArrayType):
        data = v.data
        if is_reference(t.elem):
            new_data = data  # element refs are topology, never havoc'd
        else:
            new_data = MappingV(UNKNOWN)
        length = v.length if t.size is not None else UNKNOWN
        return ArrayRecV(length, new_data)
    if isinstance(t, MappingType):
        if is_reference(t.value):
            return v
        return MappingV(UNKNOWN)
    return UNKNOWN


def fresh_address(s: PMap, universe) -> Optional[int]:
    for a in universe:
        if a not in s:
            return a
    return None


def address_cell_json(info: ProgramInfo, a: int, cell: AddressCell) -> Dict[str, Any]:
    from .values import to_json

    out: Dict[str, Any] = {"address": a, "type": cell.type, "balance": to_json(cell.balance)}
    if cell.type in info.contracts:
        sm = storage_map(info, cell)
        out["members"] = {name: _tree_json(info, sm, ref) for name, ref in cell.members.items()}
    return out


def _tree_json(info: ProgramInfo, rm: RefMap, ref: Ref, depth: int = 0) -> Any:
    from .values import to_json

    cell = rm.read(ref)
    if cell.type is None:
        return None
    v = cell.value
    t = cell.type
    if depth > 8:
        return to_json(v)
    if isinstance(v, RecordV):
        return {n: (_tree_json(info, rm, x, depth + 1) if isinstance(x, Ref) else to_json(x))
                for n, x in zip(v.names, v.values)}
    if isinstance(v, ArrayRecV):
        items = []
        if isinstance(v.length, int) and v.length <= 64:
            for i in range(v.length):
                x = v.get(i, ref)
                items.append(_tree_json(info, rm, x, depth + 1) if isinstance(x, Ref) else to_json(x))
            return items
        return to_json(v)
    if isinstance(v, MappingV) and isinstance(t, MappingType):
        keys = sorted(set(v.overrides.keys()) | _materialised_keys(rm, ref), key=repr)
        entries = []
        for k in keys:
            x = v.get(k, ref)
            entries.append([to_json(k), _tree_json(info, rm, x, depth + 1) if isinstance(x, Ref) else to_json(x)])
        return {"entries": entries}
    return to_json(v)


def _materialised_keys(rm: RefMap, ref: Ref) -> set:
    n = len(ref.key)
    return {r.key[n] for r in rm.cells.keys() if len(r.key) > n and r.key[:n] == ref.key}
