import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpl.core import AtomRef, Concat, Or, Top, Until, count_ops, is_lnf, linear_atom
from fpl.dsl import catalog_of, emit_formula, parse_formula
from fpl.normalize import NormalFormTooLarge, TooManyPaths, fuzzy_paths, switch_grid, to_lnf

from randgen import random_formula


@pytest.fixture
def cat():
    horizons = {"a": 1.0, "b": 2.0, "c": 0.5, "d": 1.5}
    return catalog_of([linear_atom(n, [0.0], [0.0], [1.0], h) for n, h in horizons.items()])


def lnf(text, cat):
    return emit_formula(to_lnf(parse_formula(text, cat)))


def test_or_distributes_over_concat(cat):
    assert lnf("(a | b) . c", cat) == "(a . c) | (b . c)"


def test_concat_on_the_left_of_until(cat):
    assert lnf("(a . b) U c", cat) == "(a U c) | (a . (b U c))"


@pytest.mark.parametrize("text,expected", [
    ("a", "a"),
    ("(a . b) . c", "a . (b . c)"),
    ("(a U b) . c", "a U (b . c)"),
    ("(a | b) U c", "(a U c) | (b U c)"),
    ("(a U b) U c", "a U (b U c)"),
    ("TOP[1] . a", "TOP[1] . a"),
])
def test_remaining_identities(cat, text, expected):
    assert lnf(text, cat) == expected


def test_interval_until_keeps_only_the_last_atom_switch(cat):
    # the interval is measured from the start of the last left atom
    assert lnf("(a . b) U_(0.5,1) c", cat) == "a . (b U_(0.5,1) c)"
    assert lnf("(a U_(0,1) b) U_(1,2) c", cat) == "a U_(0,1) (b U_(1,2) c)"


def test_lnf_is_idempotent_and_normal(cat):
    f = to_lnf(parse_formula("((a | b) . (c U d)) U (a . b)", cat))
    assert is_lnf(f)
    assert to_lnf(f) == f


def test_node_guard(cat):
    text = "a"
    for _ in range(14):
        text = f"({text} . b) U c"
    with pytest.raises(NormalFormTooLarge):
        to_lnf(parse_formula(text, cat), max_nodes=2000)


def test_count_ops(cat):
    a, b, c, d = (AtomRef(cat[n]) for n in "abcd")
    assert count_ops(Until(a, Or(b, Until(c, d))))[0] == 2
    assert count_ops(Concat(a, Concat(b, c)))[1] == 2
    assert count_ops(Until(a, b))[2] == 1.0
    assert count_ops(Concat(Top(0.25, 1), a))[2] == 0.25


def test_switch_grid():
    assert switch_grid(1.0, 0.5) == [0.0, 0.5, 1.0]
    assert switch_grid(1.1, 0.5) == [0.0, 0.5, 1.0, 1.1]
    assert switch_grid(2.0, 0.5, (0.7, 1.2)) == [0.7, 1.0, 1.2]
    assert switch_grid(1.0, 0.5, (3, 4)) == []


def _keys(paths):
    return {p.key() for p in paths}


def test_paths_of_simple_formulas(cat):
    a, b = AtomRef(cat["a"]), AtomRef(cat["b"])
    assert _keys(fuzzy_paths(a, 0.5)) == {(("a", 1.0),)}
    assert _keys(fuzzy_paths(Or(a, b), 0.5)) == {(("a", 1.0),), (("b", 2.0),)}


def test_until_paths_on_a_half_second_grid(cat):
    a, b = AtomRef(cat["a"]), AtomRef(cat["b"])
    got = _keys(fuzzy_paths(Until(a, b), 0.5))
    # the zero-length prefix of a is empty, leaving b alone
    assert got == {(("b", 2.0),), (("a", 0.5), ("b", 2.0)), (("a", 1.0), ("b", 2.0))}


def test_path_guard(cat):
    a = AtomRef(cat["b"])
    f = Until(a, Until(a, Until(a, a)))
    with pytest.raises(TooManyPaths):
        fuzzy_paths(f, 0.01, max_paths=1000)
    with pytest.raises(ValueError):
        fuzzy_paths(f, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_lnf_preserves_the_path_set(seed):
    rng = np.random.default_rng(seed)
    atoms = [linear_atom(f"x{i}", [0.0], [0.0], [1.0], float(rng.choice([0.5, 1.0, 1.5]))) for i in range(3)]
    f = random_formula(rng, atoms, 3, max_until=2)
    assert _keys(fuzzy_paths(to_lnf(f), 0.5)) == _keys(fuzzy_paths(f, 0.5))
