"""Explicit-state checking for a Solidity subset.

Pipeline: parse and type-check (``frontend``), rewrite implicit behaviour into
explicit statements (``explicate``), then explore the resulting program with
the small-step interpreter (``explorer``) or lower it to an IVL model.
"""

__version__ = "0.1.0"
