"""Run the bundled contracts through the explorer and print verdicts, traces and timings.

    python3 scripts/case_studies.py --bound 3
"""

import argparse
import time
from pathlib import Path

from solidcheck.explicate import explicate
from solidcheck.explorer import HarnessConfig, explore, replay, ERROR_FOUND
from solidcheck.typecheck import frontend
from solidcheck.types import UINT_MAX

CONTRACTS = Path(__file__).resolve().parent.parent / "contracts"

CASES = [
    ("wallet.sol", "Wallet", (0, 1, UINT_MAX)),
    ("wallet_overflow.sol", "Wallet", (0, 1, UINT_MAX)),
    ("auction_call.sol", "Auction", (0, 1, 2)),
    ("auction_call_fixed.sol", "Auction", (0, 1, 2)),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=3)
    args = ap.parse_args()
    for name, contract, domain in CASES:
        program = explicate(frontend((CONTRACTS / name).read_text()))
        cfg = HarnessConfig(contract, tx_bound=args.bound, value_domain=domain)
        t0 = time.perf_counter()
        trace = explore(program, cfg)
        elapsed = time.perf_counter() - t0
        print(f"{name}: {trace.verdict} in {elapsed:.2f} s, {trace.stats['statesExplored']} states")
        if trace.verdict == ERROR_FOUND:
            for line in trace.lines():
                print("    " + line)
            replay(program, cfg, trace)
            print(f"    replay confirmed at {trace.site}")


if __name__ == "__main__":
    main()
