"""Fuzzy paths and the extended-distance value domain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

# Semantic values are non-negative floats; math.inf is absorbing under + and max.
ExtendedDistance = float
INF: ExtendedDistance = math.inf

# Truncations are compared after rounding to this many decimals.
KEY_DIGITS = 9


def format_distance(x: ExtendedDistance) -> str:
    return "inf" if math.isinf(x) else f"{x:.6f}"


@dataclass(frozen=True)
class FuzzyPath:
    """Concatenation of truncated atoms, ``(atom, length)`` per element.

    Zero-length elements are dropped on construction: concatenating the empty
    initial part of an atom does not change a path.
    """

    elements: Tuple[tuple, ...]

    def __post_init__(self):
        kept = tuple((a, float(t)) for a, t in self.elements if t > 10.0 ** -KEY_DIGITS)
        object.__setattr__(self, "elements", kept)

    @property
    def horizon(self) -> float:
        return math.fsum(t for _, t in self.elements)

    def __add__(self, other: "FuzzyPath") -> "FuzzyPath":
        return FuzzyPath(self.elements + other.elements)

    def __len__(self):
        return len(self.elements)

    def truncate(self, t: float) -> "FuzzyPath":
        """Initial part of length ``t``."""
        out = []
        left = t
        for atom, length in self.elements:
            if left <= 10.0 ** -KEY_DIGITS:
                break
            take = min(length, left)
            out.append((atom, take))
            left -= take
        return FuzzyPath(tuple(out))

    def key(self):
        """Hashable identity: atom names and rounded lengths."""
        return tuple((a.name, round(t, KEY_DIGITS)) for a, t in self.elements)

    def __repr__(self):
        return " . ".join(f"{a.name}@{t:g}" for a, t in self.elements) or "<empty>"
