"""Reference-assignment copy matrix, kept apart so the acceptance module can time it."""

from solidcheck.types import CopyKind, LocationKind, classify_copy

SR = LocationKind.STORAGE_REFERENCE
SP = LocationKind.STORAGE_POINTER
MP = LocationKind.MEMORY_POINTER
DEEP = CopyKind.DEEP_COPY
ALIAS = CopyKind.ALIAS

# (lhs, rhs or None for "any", expected); seven rows, hard-coded
COPY_TABLE = [
    (SR, None, DEEP),
    (MP, SR, DEEP),
    (MP, SP, DEEP),
    (MP, MP, ALIAS),
    (SP, SR, ALIAS),
    (SP, SP, ALIAS),
    (SP, MP, DEEP),
]


def check_copy_table() -> int:
    """Assert every row; returns the number of (lhs, rhs) pairs checked."""
    checked = 0
    for lhs, rhs, want in COPY_TABLE:
        for r in ([rhs] if rhs is not None else list(LocationKind)):
            got = classify_copy(lhs, r)
            assert got is want, f"{lhs.value} <- {r.value}: {got.value}, expected {want.value}"
            checked += 1
    return checked
