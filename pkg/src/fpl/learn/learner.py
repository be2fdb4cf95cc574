"""Learning a formula from demonstrations: atom DAG, merging, simplification."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core.atom import linear_atom
from ..core.formula import AtomRef, atoms
from .atoms import common_step, learn_atom, remove_agreement
from .cluster import cluster_trajectories
from .config import LearnConfig, LearnError
from .dag import END, START, AtomDag, simplify_dag
from .merge import merge_similar_atoms


class _Builder:
    def __init__(self, cfg, dt):
        self.cfg = cfg
        self.dt = dt
        self.dag = AtomDag()
        self.count = 0

    def build(self, data, depth=0) -> list:
        cfg = self.cfg
        if depth > cfg.max_depth:
            raise LearnError(f"atom recursion deeper than {cfg.max_depth}")
        roots = []
        for idx in cluster_trajectories(data, cfg.init_len, cfg.cluster_std_threshold):
            if len(idx) < cfg.min_traj:
                continue
            cluster = [data[i] for i in idx]
            name = f"A{self.count}"
            self.count += 1
            fit = learn_atom(cluster, cfg, name)
            agree = remove_agreement(cluster, fit.atom, cfg)
            # The atom ends at the last deviation; never shorter than one sample.
            horizon = max(agree.d_time, self.dt)
            atom = linear_atom(name, fit.intercepts, fit.slopes, fit.stds, horizon)
            lo, hi = agree.interval
            node = self.dag.add_node(AtomRef(atom), (lo, hi), len(cluster),
                                     (fit.intercepts, fit.slopes, fit.stds))
            tails = [z for z in agree.tails if len(z) >= cfg.init_len]
            sub = self.build(tails, depth + 1) if len(tails) >= cfg.min_traj else []
            for c in sub or [END]:
                self.dag.add_edge(node, c)
            roots.append(node)
        return roots


def _check(data, cfg):
    data = list(data)
    if len(data) < cfg.min_traj:
        raise LearnError(f"need at least min_traj={cfg.min_traj} trajectories, got {len(data)}")
    dims = {z.dim for z in data}
    if len(dims) != 1:
        raise LearnError(f"trajectories have different dimensions {sorted(dims)}")
    return data


def learn_atom_dag(data, cfg: LearnConfig) -> AtomDag:
    """Cluster, fit, cut and recurse; each cluster hangs below the atom it continues."""
    data = _check(data, cfg)
    b = _Builder(cfg, common_step(data))
    roots = b.build(data)
    if not roots:
        raise LearnError("no cluster had enough trajectories to learn an atom")
    for r in roots:
        b.dag.add_edge(START, r)
    b.dag.validate()
    return b.dag


@dataclass
class LearnResult:
    formula: object
    dag: AtomDag
    merged: AtomDag
    merges: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def atoms(self) -> list:
        seen = {}
        for a in atoms(self.formula):
            seen.setdefault(a.name, a)
        return list(seen.values())


def learn(data, cfg: LearnConfig = LearnConfig()) -> LearnResult:
    dag = learn_atom_dag(data, cfg)
    merges = []
    merged = merge_similar_atoms(dag, cfg, merges)
    trace = []
    formula = simplify_dag(merged, trace)
    return LearnResult(formula, dag, merged, merges, trace)


def learn_fpl(data, cfg: LearnConfig = LearnConfig()):
    """Formula learned from positive demonstrations ``data``."""
    return learn(data, cfg).formula
