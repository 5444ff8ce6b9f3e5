"""Operational semantics of explicated Solid programs."""

from .choices import Cursor
from .interp import Interpreter, SemanticsConfig
from .state import ChainState, ExecState
from .transactions import (
    CreateAddress, CreateContractTx, CurrencyTransfer, ExecuteContract, MintBlock, TxOutcome,
    apply_transaction,
)

__all__ = [
    "ChainState", "CreateAddress", "CreateContractTx", "CurrencyTransfer", "Cursor", "ExecState",
    "ExecuteContract", "Interpreter", "MintBlock", "SemanticsConfig", "TxOutcome", "apply_transaction",
]
