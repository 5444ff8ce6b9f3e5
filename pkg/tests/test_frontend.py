import pytest
from hypothesis import given, settings, strategies as st

from solidcheck import ast as A
from solidcheck.errors import RecursiveType, SyntaxError, TypeError, UnknownIdentifier, UnsupportedFeature
from solidcheck.parser import parse_program
from solidcheck.printer import print_program
from solidcheck.typecheck import frontend
from solidcheck.types import (
    ArrayType, EnumType, LocationKind, MappingType, StructType, UINT, is_reference,
)

from frontend_cases import COPY_TABLE, check_copy_table
from support import CONTRACTS

WALLET = (CONTRACTS / "wallet.sol").read_text()


def test_copy_table_covers_all_pairs():
    assert len(COPY_TABLE) == 7
    assert check_copy_table() == 9


def test_wallet_shape():
    p = frontend(WALLET)
    assert len(p.contracts) == 1
    c = p.contracts[0]
    assert [len(e.values) for e in c.enums] == [3]
    assert [len(s.members) for s in c.structs] == [3]
    assert len(c.variables) == 1 and isinstance(c.variables[0].type, MappingType)
    assert sorted(f.name for f in c.interface) == ["close", "deposit", "open", "withdraw"]


def _exprs(p):
    for c in p.contracts:
        for f in c.functions:
            for s in A.walk_statements(f.body):
                for e in A.statement_expressions(s):
                    yield from A.sub_expressions(e)


def test_status_access_is_storage_reference():
    p = frontend(WALLET)
    hits = [e for e in _exprs(p) if isinstance(e, A.Member) and e.name == "status"]
    assert hits
    for e in hits:
        assert e.ty == EnumType("Status")
        assert isinstance(e.base.ty, StructType) and e.base.loc is LocationKind.STORAGE_REFERENCE


def test_every_reference_expression_has_one_location():
    for e in _exprs(frontend(WALLET)):
        if e.ty is None:
            continue
        if is_reference(e.ty):
            assert isinstance(e.loc, LocationKind)
        else:
            assert e.loc is None


def test_literal_in_comparison_is_uint():
    p = frontend(WALLET)
    lits = [e for e in _exprs(p) if isinstance(e, A.IntLit) and e.value == 0]
    assert lits and all(e.ty == UINT for e in lits)


@pytest.mark.parametrize("source, error", [
    ("contract A { struct S { uint a; } S s; function f() public { uint[] memory a; a = s; } }", TypeError),
    ("contract A { struct S { S[] xs; } }", RecursiveType),
    ("contract A { struct S { mapping(uint => S) m; } }", RecursiveType),
    ("contract A { uint8 x; }", UnsupportedFeature),
    ("contract A { function f() public { y = 1; } }", UnknownIdentifier),
    ("contract A { modifier m() { _; } }", UnsupportedFeature),
    ("contract A is B { }", UnsupportedFeature),
    ("contract A { function f() public { uint x = 1 } }", SyntaxError),
])
def test_rejections(source, error):
    with pytest.raises(error):
        frontend(source)


def test_round_trip_on_bundled_contracts():
    for path in sorted(CONTRACTS.glob("*.sol")):
        p = parse_program(path.read_text())
        assert parse_program(print_program(p)) == p, path.name


# -- struct graphs --------------------------------------------------------------------

WRAPPERS = [
    lambda t: t,
    lambda t: f"{t}[]",
    lambda t: f"{t}[2]",
    lambda t: f"mapping(uint => {t})",
]


@st.composite
def struct_graphs(draw):
    n = draw(st.integers(1, 5))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, 3)),
                          max_size=8))
    return n, edges


def _cyclic(n, edges):
    succ = {i: {b for a, b, _ in edges if a == i} for i in range(n)}
    state = {}

    def visit(i):
        state[i] = 1
        for j in succ[i]:
            if state.get(j) == 1 or (j not in state and visit(j)):
                return True
        state[i] = 2
        return False

    return any(i not in state and visit(i) for i in range(n))


def _source(n, edges):
    lines = []
    for i in range(n):
        members = ["uint tag;"]
        for k, (a, b, w) in enumerate(edges):
            if a == i:
                members.append(f"{WRAPPERS[w](f'S{b}')} m{k};")
        lines.append(f"struct S{i} {{ {' '.join(members)} }}")
    return "contract G { " + " ".join(lines) + " }"


@settings(max_examples=200, deadline=None)
@given(struct_graphs())
def test_acyclicity_matches_graph_search(graph):
    n, edges = graph
    src = _source(n, edges)
    if _cyclic(n, edges):
        with pytest.raises(RecursiveType):
            frontend(src)
    else:
        frontend(src)


def test_nested_array_types():
    p = frontend("contract A { uint[][] xs; uint[3] ys; }")
    assert p.contracts[0].variables[0].type == ArrayType(ArrayType(UINT))
    assert p.contracts[0].variables[1].type == ArrayType(UINT, 3)
