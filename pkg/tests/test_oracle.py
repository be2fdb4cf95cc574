import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fpl.core import AtomRef, Concat, Or, count_ops
from fpl.normalize import fuzzy_paths, to_lnf
from fpl.oracle import oracle_semantics, path_distance
from fpl.semantics import Aggregator, SemanticsConfig, atom_semantics, compute_semantics

from conftest import line_traj
from randgen import random_instance

MAX = SemanticsConfig(aggregator=Aggregator.MAX)
INT = SemanticsConfig(aggregator=Aggregator.INT)
# Handover integral at switch grid 1/8, cross-checked by a scalar trapezoid rule
HANDOVER_INT = 24.28222


@pytest.mark.parametrize("cfg", [MAX, INT], ids=["max", "int"])
def test_single_atom_matches_atom_semantics(drift, cfg):
    z = line_traj(3)
    assert oracle_semantics(z, AtomRef(drift), 0.5, cfg) == atom_semantics(z, drift, cfg)


def test_handover_reference_values(handover):
    _, f, off, mean = handover
    assert oracle_semantics(off, f, 0.125, MAX) == pytest.approx(8.0, abs=1e-9)
    assert oracle_semantics(off, f, 0.125, INT) == pytest.approx(HANDOVER_INT, abs=1e-4)
    for cfg in (MAX, INT):
        assert oracle_semantics(mean, f, 0.125, cfg) == pytest.approx(0.0, abs=1e-9)


def test_path_distance_of_a_too_long_path(handover):
    _, f, off, _ = handover
    paths = fuzzy_paths(f, 0.5)
    longest = max(paths, key=lambda p: p.horizon)
    assert longest.horizon > off.horizon
    assert path_distance(off, longest, MAX) == math.inf


def test_nested_grids_refine_monotonically(handover):
    _, f, off, _ = handover
    for cfg in (MAX, INT):
        vals = [oracle_semantics(off, f, g, cfg) for g in (0.5, 0.25, 0.125)]
        assert vals[0] >= vals[1] >= vals[2]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_until_free_formulas_agree_with_the_algorithm(seed):
    f, z, atoms = random_instance(seed, depth=3, max_until=0)
    assert count_ops(f)[0] == 0
    for cfg in (MAX, INT):
        a = compute_semantics(z, to_lnf(f), cfg)
        b = oracle_semantics(z, f, 0.5, cfg)
        assert (math.isinf(a) and math.isinf(b)) or a == pytest.approx(b, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_oracle_is_invariant_under_normalization_on_aligned_grids(seed):
    from fpl.core import linear_atom
    from randgen import random_formula, random_trajectory

    rng = np.random.default_rng(seed)
    atoms = [linear_atom(f"x{i}", rng.normal(size=2).tolist(), rng.normal(size=2).tolist(),
                         rng.uniform(0.5, 1.5, 2).tolist(), float(rng.choice([0.5, 1.0, 1.5, 2.0])))
             for i in range(3)]
    f = random_formula(rng, atoms, 3, max_until=2)
    z = random_trajectory(rng)
    for cfg in (MAX, INT):
        a = oracle_semantics(z, f, 0.25, cfg)
        b = oracle_semantics(z, to_lnf(f), 0.25, cfg)
        assert a == b


def test_or_of_orders_is_the_minimum(drift):
    z = line_traj(6)
    f = Or(AtomRef(drift), Concat(AtomRef(drift), AtomRef(drift)))
    assert oracle_semantics(z, f, 0.5, MAX) == atom_semantics(z, drift, MAX)
