from hypothesis import given, settings, strategies as st

from oracle import ERROR_FOUND, NO_VIOLATION, oracle_verdict
from oracle_cases import compare
from support import compile_source


def test_explorer_agrees_with_oracle():
    result = compare(range(60))
    assert result.mismatches == []
    assert result.checked == 120
    assert result.verdicts.get(ERROR_FOUND, 0) > 0 and result.verdicts.get(NO_VIOLATION, 0) > 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1000, 10**6))
def test_agreement_on_fresh_seeds(seed):
    assert compare([seed]).mismatches == []


def _verdict(body, bound=1):
    src = f"contract G {{ uint a; uint b; bool f; mapping(address => uint) bal; uint[] xs; {body} }}"
    return oracle_verdict(compile_source(src, solid=False), bound)


def test_oracle_sanity():
    assert _verdict("function f() public { Verification.Assert(false); }") == ERROR_FOUND
    assert _verdict("function f() public { require(false); Verification.Assert(false); }") == NO_VIOLATION
    assert _verdict("function f() public { Verification.Assert(xs[0] == 5); }") == NO_VIOLATION
    assert _verdict("function f() public { a = a + 1; Verification.Assert(a < 2); }", 1) == NO_VIOLATION
    assert _verdict("function f() public { a = a + 1; Verification.Assert(a < 2); }", 2) == ERROR_FOUND
    assert _verdict("function f() public { a = 0 - 1; Verification.Assert(a > 0); }") == NO_VIOLATION
    assert _verdict("function f(uint d) public { a = 1 / d; Verification.Assert(d != 0); }") == NO_VIOLATION
    assert _verdict("function f() public payable { Verification.Assert(msg.value == 0); }") == ERROR_FOUND
    assert _verdict("function f() public { Verification.Assert(msg.value == 0); }") == NO_VIOLATION
