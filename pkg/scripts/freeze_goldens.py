"""Regenerate the frozen verification-language golden for the Wallet contract.

Only run this after reviewing a deliberate change to the emitter; the test
suite compares against the file byte for byte.
"""

from pathlib import Path

from solidcheck.explicate import explicate
from solidcheck.ivl import emit_program, print_program
from solidcheck.ivl.check import assert_well_formed
from solidcheck.typecheck import frontend

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    program = explicate(frontend((ROOT / "contracts" / "wallet.sol").read_text()))
    text = print_program(emit_program(program, "Wallet"))
    assert_well_formed(text)
    target = ROOT / "tests" / "goldens" / "wallet_contract.bpl"
    target.write_text(text)
    print(f"wrote {target} ({len(text.splitlines())} lines)")


if __name__ == "__main__":
    main()
