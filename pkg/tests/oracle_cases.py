"""Verdict agreement between the explorer and the brute-force oracle on generated programs."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from solidcheck.explorer import HarnessConfig, explore

from gen import random_program
from oracle import oracle_verdict
from support import compile_source

DOMAIN = (0, 1)
BOUNDS = (1, 2)


@dataclass
class Agreement:
    checked: int = 0
    verdicts: Dict[str, int] = field(default_factory=dict)
    mismatches: List[Tuple[int, int, str, str]] = field(default_factory=list)


def compare_seed(seed: int, result: Agreement) -> None:
    src = random_program(random.Random(seed))
    typed = compile_source(src, solid=False)
    program = compile_source(src)
    for bound in BOUNDS:
        want = oracle_verdict(typed, bound, DOMAIN)
        got = explore(program, HarnessConfig("G", tx_bound=bound, value_domain=DOMAIN)).verdict
        result.checked += 1
        result.verdicts[want] = result.verdicts.get(want, 0) + 1
        if want != got:
            result.mismatches.append((seed, bound, want, got))


def compare(seeds) -> Agreement:
    result = Agreement()
    for seed in seeds:
        compare_seed(seed, result)
    return result
