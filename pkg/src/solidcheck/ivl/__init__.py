"""Lowering of explicated programs into a Boogie-style verification language."""

from .emit import EncodingError, emit_program
from .printer import print_program

__all__ = ["EncodingError", "emit_program", "print_program"]
