"""Left normal form and enumeration of fuzzy paths."""

from __future__ import annotations

from .core.formula import Concat, Or, Until, count_ops, is_atomic
from .core.paths import KEY_DIGITS, FuzzyPath

MAX_LNF_NODES = 10_000
MAX_PATHS = 1_000_000


class NormalFormTooLarge(RuntimeError):
    pass


class TooManyPaths(RuntimeError):
    pass


class _Rewriter:
    def __init__(self, limit):
        self.limit = limit

    def guard(self, f):
        if f.size > self.limit:
            raise NormalFormTooLarge(
                f"left normal form exceeds {self.limit} nodes; the until-over-concatenation "
                "identity duplicates its left operand"
            )
        return f

    def lnf(self, f):
        if is_atomic(f):
            return f
        if isinstance(f, Or):
            return self.guard(Or(self.lnf(f.left), self.lnf(f.right)))
        right = self.lnf(f.right)
        left = self.lnf(f.left)
        if isinstance(f, Concat):
            return self.cat(left, right)
        return self.until(left, right, f.interval)

    # ``left`` and ``right`` are already in LNF in both helpers.
    def cat(self, left, right):
        if is_atomic(left):
            out = Concat(left, right)
        elif isinstance(left, Or):
            out = Or(self.cat(left.left, right), self.cat(left.right, right))
        elif isinstance(left, Concat):
            out = Concat(left.left, self.cat(left.right, right))
        else:
            out = Until(left.left, self.cat(left.right, right), left.interval)
        return self.guard(out)

    def until(self, left, right, interval):
        if is_atomic(left):
            out = Until(left, right, interval)
        elif isinstance(left, Or):
            out = Or(self.until(left.left, right, interval), self.until(left.right, right, interval))
        elif isinstance(left, Concat):
            tail = Concat(left.left, self.until(left.right, right, interval))
            if interval is None:
                out = Or(self.until(left.left, right, None), tail)
            else:
                # An interval pins the switch to the last atom of the left operand.
                out = tail
        else:
            out = Until(left.left, self.until(left.right, right, interval), left.interval)
        return self.guard(out)


def to_lnf(f, max_nodes: int = MAX_LNF_NODES):
    """Equivalent formula whose concatenations and untils all have atomic left operands."""
    return _Rewriter(max_nodes).lnf(f)


def switch_grid(length: float, grid: float, interval=None) -> list:
    """Candidate switch times ``{0, g, 2g, ...} ∪ {length}``, optionally clipped to an interval."""
    n = int(length / grid + 1e-9)
    pts = [m * grid for m in range(n + 1)]
    if length - pts[-1] > 10.0 ** -KEY_DIGITS:
        pts.append(length)
    else:
        pts[-1] = length
    if interval is not None:
        a, b = interval
        pts = [t for t in pts if a - 1e-12 <= t <= b + 1e-12]
        pts.extend(x for x in (a, b) if 0 <= x <= length + 1e-12)
        pts = sorted({round(min(t, length), 12) for t in pts})
    return pts


def _paths(f, grid, budget):
    if is_atomic(f):
        atom = f.atom
        return [FuzzyPath(((atom, atom.horizon),))]
    if isinstance(f, Or):
        return _paths(f.left, grid, budget) + _paths(f.right, grid, budget)
    lefts = _paths(f.left, grid, budget)
    rights = _paths(f.right, grid, budget)
    if isinstance(f, Concat):
        prefixes = lefts
    else:
        prefixes = []
        for p in lefts:
            if f.interval is None:
                cuts = switch_grid(p.horizon, grid)
            else:
                # Switch inside the last element, ``interval`` relative to its start.
                head = p.horizon - p.elements[-1][1] if p.elements else 0.0
                cuts = [head + s for s in switch_grid(p.elements[-1][1], grid, f.interval)]
            prefixes.extend(p.truncate(t) for t in cuts)
    if len(prefixes) * len(rights) > budget:
        raise TooManyPaths(f"more than {budget} fuzzy paths")
    return [p + q for p in prefixes for q in rights]


def fuzzy_paths(f, grid: float, max_paths: int = MAX_PATHS) -> list:
    """Fuzzy paths of ``f`` with until switch times on ``{0, grid, ...} ∪ {end}``.

    Duplicates (same atoms, same rounded lengths) are removed; order follows
    first appearance.
    """
    if not grid > 0:
        raise ValueError("grid must be positive")
    seen = {}
    for p in _paths(f, grid, max_paths):
        seen.setdefault(p.key(), p)
    return list(seen.values())


__all__ = ["to_lnf", "fuzzy_paths", "count_ops", "switch_grid", "NormalFormTooLarge", "TooManyPaths"]
