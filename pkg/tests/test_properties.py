import random

from hypothesis import HealthCheck, given, settings, strategies as st
from pyrsistent import pmap

from solidcheck.explorer import ERROR_FOUND, HarnessConfig, explore
from solidcheck.semantics.choices import Cursor
from solidcheck.semantics.interp import Interpreter, SemanticsConfig
from solidcheck.semantics.state import ChainState, alloc, init_s, memory_map
from solidcheck.semantics.transactions import CreateAddress, apply_transaction
from solidcheck.semantics.values import Ref

from gen import random_program
from property_cases import Tally, check_injectivity, check_random_case, random_tx, scan_parents
from support import compile_source

SLOW = settings(max_examples=1000, deadline=None, suppress_health_check=list(HealthCheck))


@SLOW
@given(st.randoms(use_true_random=False))
def test_revert_atomicity_and_conservation(rng):
    tally = Tally()
    check_random_case(rng, tally)
    assert tally.outcomes > 0


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_allocation_keeps_element_parents_unique(rng):
    assert check_injectivity(rng) > 0


def test_parent_scan_detects_sharing():
    from solidcheck.semantics.values import RefCell
    program = compile_source("contract T { struct S { uint[] a; uint[] b; } S top; }", solid=False)
    interp = Interpreter(program, SemanticsConfig())
    info = interp.info
    init_s(info, pmap(), 1, "T")
    s_type = next(t for t in info.storable_types() if getattr(t, "name", None) == "S")
    root = Ref("M", (0,))
    m = alloc(info, pmap(), root, s_type)
    rec = m[root].value
    shared = rec.set("b", rec.get("a"))
    m = m.set(root, RefCell(s_type, shared))
    parents = scan_parents(memory_map(info, m), [root])
    assert any(len(ps) > 1 for ps in parents.values())


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_pinned_choices_reproduce_outcome(rng):
    program = compile_source(random_program(rng, effects=True, max_functions=2))
    interp = Interpreter(program, SemanticsConfig(value_domain=(0, 1, 2), address_universe=(1, 2, 3, 4, 5, 6),
                                                  step_budget=500, max_call_depth=3))
    cs = ChainState()
    for v in (2, 5, 9):
        (out,) = apply_transaction(interp, cs, CreateAddress(v))
        cs = out.chain
    for _ in range(5):
        tx = random_tx(rng, program, cs)
        outs = list(apply_transaction(interp, cs, tx))
        for out in outs[:8]:
            cur = Cursor(out.choices)
            (again,) = apply_transaction(interp, cs, tx, cur)
            assert cur.finished()
            assert again.status == out.status and again.chain == out.chain
        committed = [o for o in outs if o.committed]
        if committed:
            cs = rng.choice(committed).chain


def _verdict(src, bound, domain):
    return explore(compile_source(src), HarnessConfig("G", tx_bound=bound, value_domain=domain)).verdict


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_bound_monotonicity(rng):
    src = random_program(rng)
    if _verdict(src, 1, (0, 1)) == ERROR_FOUND:
        assert _verdict(src, 2, (0, 1)) == ERROR_FOUND


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_domain_monotonicity(rng):
    src = random_program(rng)
    if _verdict(src, 2, (0,)) == ERROR_FOUND:
        assert _verdict(src, 2, (0, 1)) == ERROR_FOUND


def test_sweep_is_nontrivial():
    tally = Tally()
    for seed in range(1000):
        check_random_case(random.Random(seed), tally)
    assert tally.statuses.get("committed", 0) > 0
    assert tally.reverted > 0
    assert tally.contained_calls > 0
