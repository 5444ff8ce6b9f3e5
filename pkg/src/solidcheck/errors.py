"""Exception hierarchy shared by all pipeline stages."""

from __future__ import annotations

from typing import Optional, Sequence


class SolidError(Exception):
    """Base class for user-facing errors (bad input, not tool bugs)."""


class SyntaxError(SolidError):  # noqa: A001 - shadows the builtin on purpose
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        msg = f"{line}:{col}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class UnsupportedFeature(SolidError):
    def __init__(self, construct: str, line: int = 0, col: int = 0):
        self.construct = construct
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}unsupported feature: {construct}")


class TypeError(SolidError):  # noqa: A001
    def __init__(self, message: str, found=None, expected=None, span=None):
        self.found = found
        self.expected = expected
        self.span = span
        where = f"{span}: " if span is not None else ""
        super().__init__(where + message)


class UnknownIdentifier(TypeError):
    def __init__(self, name: str, span=None):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", span=span)


class VisibilityError(TypeError):
    pass


class RecursiveType(TypeError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__("recursive type: " + " -> ".join(self.cycle))


# -- interpreter / explorer failures that indicate tool bugs -----------------


class InterpreterBug(Exception):
    pass


class UnallocatedRead(InterpreterBug):
    pass


class StuckState(InterpreterBug):
    pass


class ArityMismatch(InterpreterBug):
    pass


class ReplayDivergence(Exception):
    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        super().__init__(message)


class ScriptError(SolidError):
    pass
