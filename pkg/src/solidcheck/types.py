"""Solid types, data-location kinds and the reference-assignment copy matrix."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

UINT_BITS = 256
UINT_MOD = 1 << UINT_BITS
UINT_MAX = UINT_MOD - 1
INT_MIN = -(1 << (UINT_BITS - 1))
INT_MAX = (1 << (UINT_BITS - 1)) - 1
ADDRESS_MOD = 1 << 160


@dataclass(frozen=True)
class UIntType:
    def __str__(self) -> str:
        return "uint"


@dataclass(frozen=True)
class IntType:
    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True)
class BoolType:
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class AddressType:
    def __str__(self) -> str:
        return "address"


@dataclass(frozen=True)
class ContractType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class EnumType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class StructType:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ArrayType:
    elem: "SolidType"
    size: Optional[int] = None  # None for dynamic arrays

    def __str__(self) -> str:
        return f"{self.elem}[{'' if self.size is None else self.size}]"


@dataclass(frozen=True)
class MappingType:
    key: "SolidType"
    value: "SolidType"

    def __str__(self) -> str:
        return f"mapping({self.key} => {self.value})"


SolidType = Union[
    UIntType, IntType, BoolType, AddressType, ContractType, EnumType, StructType, ArrayType, MappingType
]

UINT = UIntType()
INT = IntType()
BOOL = BoolType()
ADDRESS = AddressType()


def is_reference(t: SolidType) -> bool:
    """Reference types live in their own reference cells; everything else is inline."""
    return isinstance(t, (ArrayType, StructType, MappingType))


def is_elementary(t: SolidType) -> bool:
    return isinstance(t, (UIntType, IntType, BoolType, AddressType, ContractType, EnumType))


def is_numeric(t: SolidType) -> bool:
    return isinstance(t, (UIntType, IntType))


def is_addresslike(t: SolidType) -> bool:
    return isinstance(t, (AddressType, ContractType))


class LocationKind(enum.Enum):
    STORAGE_REFERENCE = "StorageReference"
    STORAGE_POINTER = "StoragePointer"
    MEMORY_POINTER = "MemoryPointer"

    @property
    def in_storage(self) -> bool:
        return self is not LocationKind.MEMORY_POINTER


class CopyKind(enum.Enum):
    DEEP_COPY = "DeepCopy"
    ALIAS = "Alias"


def classify_copy(lhs: LocationKind, rhs: LocationKind) -> CopyKind:
    if lhs is LocationKind.STORAGE_REFERENCE:
        return CopyKind.DEEP_COPY
    if lhs is LocationKind.MEMORY_POINTER:
        return CopyKind.ALIAS if rhs is LocationKind.MEMORY_POINTER else CopyKind.DEEP_COPY
    # storage pointer
    return CopyKind.DEEP_COPY if rhs is LocationKind.MEMORY_POINTER else CopyKind.ALIAS


def wrap_uint(v: int) -> int:
    return v % UINT_MOD


def wrap_int(v: int) -> int:
    return ((v - INT_MIN) % UINT_MOD) + INT_MIN


def wrap(t: SolidType, v: int) -> int:
    return wrap_int(v) if isinstance(t, IntType) else wrap_uint(v)
