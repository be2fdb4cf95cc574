import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpl.core import AtomRef, Concat, Or, Top, Until, linear_atom
from fpl.dsl import (AtomCatalog, FormulaSyntaxError, SchemaError, UnknownAtom, catalog_of, emit_atoms,
                     emit_formula, emit_trajectory, parse_atoms, parse_formula, parse_trajectory,
                     placeholder_catalog)

from conftest import FIXTURES


@pytest.fixture
def cat():
    return catalog_of([linear_atom(n, [0.0], [1.0], [0.5], 2.0) for n in "abcd"])


def test_precedence_or_until_concat(cat):
    f = parse_formula("a | b U c . d", cat)
    a, b, c, d = (AtomRef(cat[n]) for n in "abcd")
    assert f == Or(a, Until(b, Concat(c, d)))


def test_until_and_concat_are_right_associative(cat):
    a, b, c = (AtomRef(cat[n]) for n in "abc")
    assert parse_formula("a U b U c", cat) == Until(a, Until(b, c))
    assert parse_formula("a . b . c", cat) == Concat(a, Concat(b, c))
    assert parse_formula("a | b | c", cat) == Or(Or(a, b), c)


def test_eventually_and_top(cat):
    f = parse_formula("F[2.5] a", cat)
    assert f == Until(Top(2.5, 1), AtomRef(cat["a"]))
    assert parse_formula("TOP[1] . a", cat).left == Top(1, 1)


def test_interval_until(cat):
    f = parse_formula("a U_(1, 1.5) b", cat)
    assert f.interval == (1.0, 1.5)
    assert emit_formula(f) == "a U_(1,1.5) b"


@pytest.mark.parametrize("text,line,col", [
    ("a |", 1, 4),
    ("a # b", 1, 3),
    ("a U\n  (b . )", 2, 8),
    ("a U_(2,1) b", 1, 9),
    ("F[0] a", 1, 3),
])
def test_syntax_errors_carry_positions(cat, text, line, col):
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula(text, cat)
    assert (e.value.line, e.value.col) == (line, col)


def test_unknown_atom(cat):
    with pytest.raises(UnknownAtom):
        parse_formula("a . zz", cat)


def test_emit_parenthesizes_compound_operands(cat):
    f = parse_formula("(a | b) . c", cat)
    assert emit_formula(f) == "(a | b) . c"
    assert emit_formula(parse_formula("a . (b U c)", cat)) == "a . (b U c)"


def _formulas(names):
    leaf = st.sampled_from(names)
    return st.recursive(
        leaf,
        lambda kids: st.tuples(st.sampled_from(["|", ".", "U"]), kids, kids),
        max_leaves=8,
    )


def _build(tree, cat):
    if isinstance(tree, str):
        return AtomRef(cat[tree])
    op, l, r = tree
    return {"|": Or, ".": Concat, "U": Until}[op](_build(l, cat), _build(r, cat))


@settings(max_examples=100, deadline=None)
@given(_formulas(list("abcd")))
def test_emit_parse_round_trip(tree):
    cat = catalog_of([linear_atom(n, [0.0], [1.0], [0.5], 2.0) for n in "abcd"])
    f = _build(tree, cat)
    assert parse_formula(emit_formula(f), cat) == f


def test_atom_json_round_trip():
    text = (FIXTURES / "handover_atoms.json").read_text()
    cat = parse_atoms(text)
    again = parse_atoms(emit_atoms(cat))
    for a in cat:
        b = again[a.name]
        assert a.horizon == b.horizon
        assert a.cov.kind == b.cov.kind
        t = np.linspace(0, a.horizon, 5)
        np.testing.assert_array_equal(a.mean_on(t), b.mean_on(t))
        np.testing.assert_array_equal(a.cov.variances_on(t), b.cov.variances_on(t))


def test_atom_json_full_and_top_entries():
    doc = {"dim": 2, "atoms": [
        {"name": "free", "kind": "top", "horizon": 2},
        {"name": "f", "horizon": 1, "mean": [[[0, 0], [1, 1]], [[0, 0]]],
         "cov": {"kind": "full", "entries": [[[[0, 2]], [[0, 1]]], [[[0, 1]], [[0, 2]]]]}},
    ]}
    with pytest.raises(SchemaError):
        # the constant mean for dimension 2 does not cover [0, 1]
        parse_atoms(json.dumps(doc))
    doc["atoms"][1]["mean"][1] = [[0, 0], [1, 0]]
    doc["atoms"][1]["cov"]["entries"] = [[[[0, 2], [1, 2]], [[0, 1], [1, 1]]], [[[0, 1], [1, 1]], [[0, 2], [1, 2]]]]
    cat = parse_atoms(json.dumps(doc))
    f = parse_formula("free . f", cat)
    assert isinstance(f.left, Top) and f.left.horizon == 2
    assert cat["f"].cov.kind == "full"


@pytest.mark.parametrize("doc", [
    "{",
    '{"atoms": []}',
    '{"dim": 1, "atoms": [{"name": "U", "horizon": 1}]}',
    '{"dim": 1, "atoms": [{"name": "a", "horizon": -1}]}',
    '{"dim": 1, "atoms": [{"name": "a", "horizon": 1, "mean": [[[0, 0], [1, 0]]], "cov": {"kind": "weird", "entries": []}}]}',
    '{"dim": 1, "atoms": [{"name": "a", "horizon": 1, "mean": [[[0, 0], [1, 0]]], "cov": {"kind": "diagonal", "entries": [[[0, 0], [1, 1]]]}}]}',
])
def test_bad_atom_documents(doc):
    with pytest.raises(SchemaError):
        parse_atoms(doc)


def test_duplicate_atom_names():
    a = linear_atom("a", [0.0], [0.0], [1.0], 1.0)
    cat = AtomCatalog(1)
    cat.add(a)
    with pytest.raises(SchemaError):
        cat.add(a)


def test_trajectory_csv_round_trip():
    z = parse_trajectory("t,x,y\n0,0,-1\n1.5,1.5,-1\n3,3,-1\n")
    assert z.horizon == 3 and z.dim == 2
    again = parse_trajectory(emit_trajectory(z, ["x", "y"]))
    np.testing.assert_array_equal(again.points, z.points)


@pytest.mark.parametrize("text", [
    "", "x,y\n0,1\n", "t,x\n1,0\n", "t,x\n0,0\n0,1\n", "t,x\n0,a\n", "t,x\n0,1,2\n", "t,x\n0,inf\n",
])
def test_bad_trajectories(text):
    with pytest.raises(SchemaError):
        parse_trajectory(text)


def test_placeholder_catalog_accepts_any_names():
    text = "(alpha | beta) . gamma"
    f = parse_formula(text, placeholder_catalog(text))
    assert emit_formula(f) == "(alpha | beta) . gamma"
