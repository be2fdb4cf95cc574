"""Atom DAGs: structure, split potential, simplification into a formula."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from ..core.formula import AtomRef, Concat, Or, Until
from ..dsl import emit_formula

START = "start"
END = "end"


class DagError(ValueError):
    pass


class SimplifyError(RuntimeError):
    """Simplification could not proceed, or the potential failed to decrease."""


@dataclass(frozen=True)
class Node:
    id: int
    fragment: object
    interval: Optional[tuple] = None
    support: int = 0
    # Linear atom parameters (intercepts, slopes, stds) for learned atoms.
    params: Optional[tuple] = None

    @property
    def atom(self):
        return self.fragment.atom if isinstance(self.fragment, AtomRef) else None


class AtomDag:
    def __init__(self):
        self.nodes = {}
        self.children = {START: set(), END: set()}
        self.parents = {START: set(), END: set()}
        self._next = 1

    # --- construction
    def add_node(self, fragment, interval=None, support=0, params=None) -> int:
        nid = self._next
        self._next += 1
        self.nodes[nid] = Node(nid, fragment, interval, support, params)
        self.children[nid] = set()
        self.parents[nid] = set()
        return nid

    def add_edge(self, u, v):
        if u == END or v == START or u == v:
            raise DagError(f"invalid edge {u} -> {v}")
        self.children[u].add(v)
        self.parents[v].add(u)

    def remove_node(self, u):
        for c in self.children.pop(u):
            self.parents[c].discard(u)
        for p in self.parents.pop(u):
            self.children[p].discard(u)
        del self.nodes[u]

    def copy(self) -> "AtomDag":
        g = AtomDag()
        g.nodes = dict(self.nodes)
        g.children = {k: set(v) for k, v in self.children.items()}
        g.parents = {k: set(v) for k, v in self.parents.items()}
        g._next = self._next
        return g

    @classmethod
    def chain(cls, fragments) -> "AtomDag":
        g = cls()
        prev = START
        for f in fragments:
            n = g.add_node(f)
            g.add_edge(prev, n)
            prev = n
        g.add_edge(prev, END)
        return g

    # --- queries
    def internal(self) -> list:
        return sorted(self.nodes)

    def kids(self, u) -> list:
        return sorted(self.children[u], key=_order)

    def size(self) -> int:
        return len(self.nodes) + 2

    def edges(self) -> list:
        return [(u, v) for u in [START] + self.internal() for v in self.kids(u)]

    def topo_order(self) -> list:
        indeg = {u: len(p) for u, p in self.parents.items()}
        ready = [START]
        out = []
        while ready:
            u = ready.pop(0)
            out.append(u)
            for c in self.kids(u):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
            ready.sort(key=_order)
        if len(out) != len(self.parents):
            raise DagError("graph has a cycle or a node unreachable from start")
        return out

    def descendants(self, u) -> set:
        seen = set()
        stack = [u]
        while stack:
            for c in self.children[stack.pop()]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    def related(self, u, v) -> bool:
        return v in self.descendants(u) or u in self.descendants(v)

    def validate(self):
        if self.parents[START] or self.children[END]:
            raise DagError("start has parents or end has children")
        order = self.topo_order()
        reach = self.descendants(START)
        for u in order:
            if u in (START, END):
                continue
            if u not in reach or END not in self.descendants(u):
                raise DagError(f"node {u} is not on a start-to-end path")

    # --- potentials
    def psi_of(self) -> dict:
        psi = {START: 0, END: 0}
        for u in reversed(self.topo_order()):
            if u in (START, END):
                continue
            psi[u] = sum(psi[c] + 1 for c in self.children[u]) - 1
        return psi

    def psi(self) -> int:
        p = self.psi_of()
        return sum(v for u, v in p.items() if u not in (START, END))

    def phi(self) -> int:
        return len(self.nodes) + 2 * self.psi()

    # --- serialization
    def to_json(self) -> dict:
        nodes = []
        for u in self.internal():
            n = self.nodes[u]
            nodes.append({
                "id": u,
                "atom": emit_formula(n.fragment),
                "interval": None if n.interval is None else [float(x) for x in n.interval],
                "support": n.support,
            })
        edges = [[_label(u), _label(v)] for u, v in self.edges()]
        return {"nodes": nodes, "edges": edges}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def __repr__(self):
        arcs = ", ".join(f"{_label(u)}->{_label(v)}" for u, v in self.edges())
        return f"AtomDag({arcs})"


def _order(u):
    if u == START:
        return (0, 0)
    if u == END:
        return (2, 0)
    return (1, u)


def _label(u):
    return u if isinstance(u, str) else int(u)


# --------------------------------------------------------------------------- simplification

def _point(interval):
    return interval is not None and abs(interval[1] - interval[0]) <= 1e-9


def _hull(a, b):
    if a is None or b is None:
        return a if b is None else b
    return (min(a[0], b[0]), max(a[1], b[1]))


def _replace(g, old, frag, interval, support, parents, children):
    w = g.add_node(frag, interval, support)
    for u in old:
        g.remove_node(u)
    for p in parents:
        g.add_edge(p, w)
    for c in children:
        g.add_edge(w, c)
    return w


def chain(left, right, interval):
    """``left U_interval right`` (``.`` for a point interval), nested to the right.

    ``(x U y) U z`` and ``x U (y U z)`` denote the same paths, so the new
    operand is pushed down the right spine of ``left``.
    """
    if isinstance(left, (Until, Concat)):
        inner = chain(left.right, right, interval)
        if isinstance(left, Until):
            return Until(left.left, inner, left.interval)
        return Concat(left.left, inner)
    if _point(interval):
        return Concat(left, right)
    return Until(left, right, interval)


def try_extend(g: AtomDag) -> bool:
    for u in reversed(g.topo_order()):
        if u in (START, END):
            continue
        kids = g.children[u]
        if len(kids) != 1:
            continue
        (v,) = kids
        if v == END or g.parents[v] != {u}:
            continue
        nu, nv = g.nodes[u], g.nodes[v]
        frag = chain(nu.fragment, nv.fragment, nu.interval)
        _replace(g, (u, v), frag, nv.interval, nu.support,
                 set(g.parents[u]), set(g.children[v]))
        return True
    return False


def try_join(g: AtomDag) -> bool:
    ids = g.internal()
    for i, u in enumerate(ids):
        for v in ids[i + 1:]:
            if g.parents[u] == g.parents[v] and g.children[u] == g.children[v]:
                nu, nv = g.nodes[u], g.nodes[v]
                _replace(g, (u, v), Or(nu.fragment, nv.fragment), _hull(nu.interval, nv.interval),
                         nu.support + nv.support, set(g.parents[u]), set(g.children[u]))
                return True
    return False


def try_split(g: AtomDag) -> bool:
    for u in g.internal():
        kids = g.kids(u)
        if len(kids) > 1:
            n = g.nodes[u]
            parents = set(g.parents[u])
            g.remove_node(u)
            for part in (kids[:1], kids[1:]):
                w = g.add_node(n.fragment, n.interval, n.support, n.params)
                for p in parents:
                    g.add_edge(p, w)
                for c in part:
                    g.add_edge(w, c)
            return True
    return False


STEPS = (("extend", try_extend), ("join", try_join), ("split", try_split))


@dataclass(frozen=True)
class TraceStep:
    op: str
    phi_before: int
    phi_after: int
    size_after: int


def simplify_dag(dag: AtomDag, trace: Optional[list] = None):
    """Reduce ``dag`` to start, one node, end; return that node's formula.

    The input is not modified. Every step is checked to lower the potential
    (by exactly one for a split); a violation or a graph where no step
    applies raises SimplifyError.
    """
    g = dag.copy()
    if not g.nodes:
        raise SimplifyError("DAG has no internal nodes")
    g.validate()
    trace = [] if trace is None else trace
    while g.size() > 3:
        before = g.phi()
        for op, step in STEPS:
            if step(g):
                break
        else:
            raise SimplifyError(f"no simplification applies to {g!r}")
        after = g.phi()
        trace.append(TraceStep(op, before, after, g.size()))
        if not after < before or (op == "split" and after != before - 1):
            raise SimplifyError(f"potential went from {before} to {after} on {op}")
    (only,) = g.nodes.values()
    return only.fragment


def simplifiable(dag: AtomDag) -> bool:
    try:
        simplify_dag(dag)
    except SimplifyError:
        return False
    return True


__all__ = ["AtomDag", "Node", "START", "END", "DagError", "SimplifyError", "TraceStep",
           "simplify_dag", "simplifiable", "chain", "try_extend", "try_join", "try_split"]
