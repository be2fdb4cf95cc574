"""Brute-force reference semantics: enumerate fuzzy paths and minimize directly."""

from __future__ import annotations

from .core.paths import INF, KEY_DIGITS
from .core.plf import DOMAIN_TOL
from .normalize import MAX_PATHS, fuzzy_paths
from .semantics import Aggregator, SemanticsConfig, _atom_value


class _Pieces:
    """Cache of element distances keyed by (atom, start offset, length)."""

    def __init__(self, z, cfg):
        self.z = z
        self.cfg = cfg
        self.values = {}
        self.cuts = {}

    def __call__(self, atom, offset, length):
        key = (id(atom), round(offset, KEY_DIGITS), round(length, KEY_DIGITS))
        v = self.values.get(key)
        if v is None:
            cut = atom
            if length < atom.horizon:
                ck = (id(atom), key[2])
                cut = self.cuts.get(ck)
                if cut is None:
                    cut = self.cuts[ck] = atom.truncate(length)
            v = self.values[key] = _atom_value(self.z, offset, cut, self.cfg)
        return v


def path_distance(z, path, cfg: SemanticsConfig, pieces=None) -> float:
    """Distance of ``z`` to one fuzzy path: max or sum over its elements."""
    if path.horizon > z.horizon + DOMAIN_TOL:
        return INF
    pieces = pieces or _Pieces(z, cfg)
    total = 0.0
    offset = 0.0
    for atom, length in path.elements:
        v = pieces(atom, offset, length)
        total = max(total, v) if cfg.aggregator is Aggregator.MAX else total + v
        offset += length
    return total


def oracle_semantics(z, f, grid: float, cfg: SemanticsConfig, max_paths: int = MAX_PATHS) -> float:
    """Minimum path distance over the fuzzy paths of ``f`` with switch times on ``grid``.

    Accepts any formula; no normal form is needed.
    """
    pieces = _Pieces(z, cfg)
    best = INF
    for p in fuzzy_paths(f, grid, max_paths):
        best = min(best, path_distance(z, p, cfg, pieces))
    return best
