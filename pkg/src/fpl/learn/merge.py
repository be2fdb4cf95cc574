"""Merging similar learned atoms inside a DAG."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.atom import linear_atom
from ..core.formula import AtomRef
from .config import LearnConfig
from .dag import AtomDag, _hull, simplifiable


def symmetric_kl(a, b, samples: int = 20) -> float:
    """Mean over ``samples`` common times and dimensions of the symmetric Gaussian KL."""
    t = np.linspace(0.0, min(a.horizon, b.horizon), samples)
    ma, mb = a.mean_on(t), b.mean_on(t)
    va, vb = a.cov.variances_on(t), b.cov.variances_on(t)
    d2 = (ma - mb) ** 2
    kl = (va + d2) / (2 * vb) + (vb + d2) / (2 * va) - 1.0
    return float(np.mean(kl))


def similarity(a, b, time_weight: float = 1.0, samples: int = 20) -> float:
    """``exp(-(KL_sym + w |tau_a - tau_b| / max tau))``, 1 for identical atoms."""
    mismatch = abs(a.horizon - b.horizon) / max(a.horizon, b.horizon)
    return float(np.exp(-(symmetric_kl(a, b, samples) + time_weight * mismatch)))


def merge_params(pu, pv, nu: int, nv: int):
    """Inverse-variance weighted line, support-weighted pooled variance."""
    au, bu, su = pu
    av, bv, sv = pv
    wu, wv = 1.0 / su ** 2, 1.0 / sv ** 2
    a = (wu * au + wv * av) / (wu + wv)
    b = (wu * bu + wv * bv) / (wu + wv)
    nu, nv = max(nu, 1), max(nv, 1)
    s = np.sqrt((nu * su ** 2 + nv * sv ** 2) / (nu + nv))
    return a, b, s


@dataclass(frozen=True)
class MergeEvent:
    kept: int
    removed: int
    score: float
    node: int


def _candidates(g, cfg):
    ids = [u for u in g.internal() if g.nodes[u].params is not None]
    out = []
    for i, u in enumerate(ids):
        for v in ids[i + 1:]:
            au, av = g.nodes[u].atom, g.nodes[v].atom
            if au.dim != av.dim:
                continue
            s = similarity(au, av, cfg.merge_time_weight, cfg.merge_samples)
            if s > cfg.merge_similarity_threshold:
                out.append((s, u, v))
    out.sort(key=lambda x: (-x[0], x[1], x[2]))
    return out


def _merged(g, u, v):
    nu, nv = g.nodes[u], g.nodes[v]
    a, b, s = merge_params(nu.params, nv.params, nu.support, nv.support)
    horizon = max(nu.atom.horizon, nv.atom.horizon)
    atom = linear_atom(nu.atom.name, a, b, s, horizon)
    h = g.copy()
    w = h.add_node(AtomRef(atom), _hull(nu.interval, nv.interval), nu.support + nv.support, (a, b, s))
    parents = (h.parents[u] | h.parents[v]) - {u, v}
    children = (h.children[u] | h.children[v]) - {u, v}
    h.remove_node(u)
    h.remove_node(v)
    for p in sorted(parents, key=str):
        h.add_edge(p, w)
    for c in sorted(children, key=str):
        h.add_edge(w, c)
    return h, w


def merge_similar_atoms(dag: AtomDag, cfg: LearnConfig, events=None) -> AtomDag:
    """Greedily merge the most similar unrelated pair until none scores above threshold.

    Pairs in an ancestor/descendant relation are never merged, and neither
    are pairs whose merge would leave a DAG that cannot be simplified.
    """
    g = dag.copy()
    events = [] if events is None else events
    rejected = set()
    while True:
        for s, u, v in _candidates(g, cfg):
            if (u, v) in rejected or g.related(u, v):
                continue
            h, w = _merged(g, u, v)
            if not simplifiable(h):
                rejected.add((u, v))
                continue
            events.append(MergeEvent(u, v, s, w))
            g = h
            break
        else:
            return g
