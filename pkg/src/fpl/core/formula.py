"""Formula AST: atoms combined by disjunction, concatenation and until."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple, Union

from .atom import Atom, TopAtom


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class AtomRef:
    atom: Atom

    @property
    def horizon(self) -> float:
        return self.atom.horizon

    @property
    def dim(self) -> int:
        return self.atom.dim

    @cached_property
    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class Top:
    horizon: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "horizon", float(self.horizon))

    @cached_property
    def atom(self) -> TopAtom:
        return TopAtom(self.horizon, self.dim)

    @cached_property
    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    @cached_property
    def size(self) -> int:
        return 1 + self.left.size + self.right.size


@dataclass(frozen=True)
class Concat:
    left: "Formula"
    right: "Formula"

    @cached_property
    def size(self) -> int:
        return 1 + self.left.size + self.right.size


@dataclass(frozen=True)
class Until:
    """``left U right``; ``interval`` optionally restricts the switch time.

    The interval is measured from the start of the last atom of ``left``,
    which for an atomic left operand is simply the switch time.
    """

    left: "Formula"
    right: "Formula"
    interval: Optional[Tuple[float, float]] = field(default=None)

    def __post_init__(self):
        if self.interval is not None:
            a, b = (float(x) for x in self.interval)
            if b < a or a < 0:
                raise FormulaError(f"bad until interval ({a:g}, {b:g})")
            object.__setattr__(self, "interval", (a, b))

    @cached_property
    def size(self) -> int:
        return 1 + self.left.size + self.right.size


Formula = Union[AtomRef, Top, Or, Concat, Until]
ATOMIC = (AtomRef, Top)


def is_atomic(f) -> bool:
    return isinstance(f, ATOMIC)


def leaf_atom(f):
    """The atom object (``Atom`` or ``TopAtom``) behind an atomic node."""
    return f.atom


def atoms(f) -> list:
    """All atoms of ``f`` in left-to-right order (with repetitions)."""
    out = []
    stack = [f]
    while stack:
        node = stack.pop()
        if is_atomic(node):
            out.append(node.atom)
        else:
            stack.append(node.right)
            stack.append(node.left)
    return out


def h_min(f) -> float:
    return min(a.horizon for a in atoms(f))


def count_ops(f):
    """``(k_until, k_cat_until, h_min)`` of a formula."""
    k_until = k_cat = 0
    stack = [f]
    while stack:
        node = stack.pop()
        if is_atomic(node):
            continue
        if isinstance(node, Until):
            k_until += 1
            k_cat += 1
        elif isinstance(node, Concat):
            k_cat += 1
        stack.extend((node.left, node.right))
    return k_until, k_cat, h_min(f)


def is_lnf(f) -> bool:
    """Every concatenation and until has an atomic left operand."""
    stack = [f]
    while stack:
        node = stack.pop()
        if is_atomic(node):
            continue
        if isinstance(node, (Concat, Until)) and not is_atomic(node.left):
            return False
        stack.extend((node.left, node.right))
    return True


def formula_dim(f) -> int:
    dims = {a.dim for a in atoms(f)}
    if len(dims) != 1:
        raise FormulaError(f"atoms of a formula must share one dimension, got {sorted(dims)}")
    return dims.pop()
