"""Compare explorer verdicts with the brute-force oracle over generated programs.

    python3 scripts/oracle_agreement.py --seeds 200 --bounds 1 2 3
"""

import argparse
import random
import time

import _paths  # noqa: F401

from gen import random_program
from oracle import oracle_verdict
from solidcheck.explorer import HarnessConfig, explore
from support import compile_source


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--bounds", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--domain", type=int, nargs="+", default=[0, 1])
    args = ap.parse_args()
    domain = tuple(args.domain)
    rows = {b: {"agree": 0, "disagree": 0, "ErrorFound": 0, "seconds": 0.0} for b in args.bounds}
    for seed in range(args.start, args.start + args.seeds):
        src = random_program(random.Random(seed))
        typed, program = compile_source(src, solid=False), compile_source(src)
        for b in args.bounds:
            t0 = time.perf_counter()
            got = explore(program, HarnessConfig("G", tx_bound=b, value_domain=domain)).verdict
            rows[b]["seconds"] += time.perf_counter() - t0
            want = oracle_verdict(typed, b, domain)
            rows[b]["agree" if got == want else "disagree"] += 1
            rows[b]["ErrorFound"] += want == "ErrorFound"
            if got != want:
                print(f"seed {seed} bound {b}: oracle {want}, explorer {got}")
    print(f"{'bound':>5} {'agree':>6} {'disagree':>8} {'errors':>6} {'explorer s':>10}")
    for b, r in rows.items():
        print(f"{b:>5} {r['agree']:>6} {r['disagree']:>8} {r['ErrorFound']:>6} {r['seconds']:>10.2f}")


if __name__ == "__main__":
    main()
