"""Check revert atomicity and currency conservation on random programs and scripts.

    python3 scripts/property_sweep.py --programs 5000 --length 8
"""

import argparse
import random
import time

import _paths  # noqa: F401

from property_cases import Tally, check_injectivity, check_random_case


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--programs", type=int, default=1000)
    ap.add_argument("--length", type=int, default=6, help="transactions per script")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--alloc-programs", type=int, default=100, help="programs for the injectivity check")
    args = ap.parse_args()

    tally = Tally()
    t0 = time.perf_counter()
    for k in range(args.programs):
        check_random_case(random.Random(args.seed + k), tally, args.length)
    print(f"{tally.programs} programs, {tally.transactions} transactions, {tally.outcomes} outcomes "
          f"in {time.perf_counter() - t0:.1f} s")
    for status, n in sorted(tally.statuses.items()):
        print(f"  {status:<10} {n}")
    print(f"  contained low-level call failures: {tally.contained_calls}")

    t0 = time.perf_counter()
    rng = random.Random(args.seed)
    cells = sum(check_injectivity(rng) for _ in range(args.alloc_programs))
    print(f"injectivity: {args.alloc_programs} programs, {cells} reachable cells, "
          f"{time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
