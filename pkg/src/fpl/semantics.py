"""Quantitative semantics: trajectory-to-atom distances, the recursive approximation
over formulas in left normal form, and its a-priori error bound."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .core.formula import Concat, Or, atoms, count_ops, is_atomic, is_lnf
from .core.paths import INF
from .core.plf import DOMAIN_TOL
from .metrics import Metric, distances, space_lipschitz
from .normalize import switch_grid, to_lnf

log = logging.getLogger(__name__)

# Elements shorter than this are empty and contribute nothing.
ZERO_LENGTH = 1e-9


class Aggregator(Enum):
    MAX = "max"
    INT = "int"

    @classmethod
    def parse(cls, text: str) -> "Aggregator":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown aggregator {text!r}; expected max or int") from None

    def combine(self, a: float, b: float) -> float:
        return max(a, b) if self is Aggregator.MAX else a + b


class BoundError(ValueError):
    pass


@dataclass(frozen=True)
class SemanticsConfig:
    metric: Metric = Metric.MAHALANOBIS
    aggregator: Aggregator = Aggregator.MAX
    delta_until: float = 0.5
    delta_atom: float = 0.01
    report_bound: bool = False

    def __post_init__(self):
        if not self.delta_until > 0:
            raise ValueError("delta_until must be positive")
        if not self.delta_atom > 0:
            raise ValueError("delta_atom must be positive")


def _atom_grid(z, offset, atom, step):
    tau = atom.horizon
    n = int(math.floor(tau / step + 1e-9))
    pts = [np.arange(n + 1) * step, [tau], atom.breakpoints()]
    zt = z.times - offset
    pts.append(zt[(zt > 0) & (zt < tau)])
    grid = np.unique(np.concatenate(pts))
    return grid[grid <= tau]


def _atom_value(z, offset, atom, cfg):
    """Distance of ``z`` shifted by ``offset`` to ``atom`` (no shift is materialized)."""
    tau = atom.horizon
    if tau <= ZERO_LENGTH:
        return 0.0
    if z.horizon - offset < tau - DOMAIN_TOL:
        return INF
    if atom.is_top:
        return 0.0
    grid = _atom_grid(z, offset, atom, cfg.delta_atom)
    pts = z(np.minimum(grid + offset, z.horizon))
    d = distances(pts, atom, grid, cfg.metric)
    if cfg.aggregator is Aggregator.MAX:
        return float(np.max(d))
    return float(np.sum(0.5 * (d[1:] + d[:-1]) * np.diff(grid)))


def atom_semantics(z, atom, cfg: SemanticsConfig) -> float:
    """Max or integral of the point distance along the atom's horizon.

    Infinite when the trajectory is shorter than the atom; zero for a
    zero-length atom.
    """
    return _atom_value(z, 0.0, atom, cfg)


class _Evaluator:
    def __init__(self, z, cfg):
        self.z = z
        self.cfg = cfg
        self.agg = cfg.aggregator
        self.memo = {}
        self.cuts = {}

    def leaf(self, node, offset, length=None):
        atom = node.atom
        if length is not None and length < atom.horizon:
            key = (id(node), round(length, 12))
            cut = self.cuts.get(key)
            if cut is None:
                cut = self.cuts[key] = atom.truncate(length)
            atom = cut
        return _atom_value(self.z, offset, atom, self.cfg)

    def run(self, node, offset):
        key = (id(node), round(offset, 9))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        val = self._run(node, offset)
        self.memo[key] = val
        return val

    def _run(self, node, offset):
        avail = self.z.horizon - offset
        if is_atomic(node):
            if node.atom.horizon > avail + DOMAIN_TOL:
                return INF
            return self.leaf(node, offset)
        if isinstance(node, Or):
            return min(self.run(node.left, offset), self.run(node.right, offset))
        left = node.left
        tau = left.atom.horizon
        if isinstance(node, Concat):
            if tau > avail + DOMAIN_TOL:
                return INF
            x1 = self.leaf(left, offset)
            x2 = self.run(node.right, offset + tau)
            return self.agg.combine(x1, x2)
        best = INF
        for t in switch_grid(tau, self.cfg.delta_until, node.interval):
            # Switch times past the end of the trajectory cannot be realized.
            if t > avail + DOMAIN_TOL:
                continue
            x1 = self.leaf(left, offset, t)
            if x1 >= best:
                continue
            x2 = self.run(node.right, offset + t)
            best = min(best, self.agg.combine(x1, x2))
        return best


def compute_semantics(z, f, cfg: SemanticsConfig) -> float:
    """Approximate distance of trajectory ``z`` to formula ``f``.

    Until operators are evaluated on switch times ``{0, d, 2d, ...} ∪ {tau}``
    with ``d = cfg.delta_until``; the result never underestimates the
    value over that grid of the exact semantics.
    """
    if not is_lnf(f):
        warnings.warn("formula is not in left normal form; normalizing", stacklevel=2)
        f = to_lnf(f)
    return _Evaluator(z, cfg).run(f, 0.0)


@dataclass(frozen=True)
class LipschitzConstants:
    """Constants for the error bound: trajectory ``K_z``, distance in space, distance in time."""

    k_traj: float
    k_space: float
    k_time: float
    estimated: bool = True


def _distinct_atoms(f):
    seen = {}
    for a in atoms(f):
        if not a.is_top:
            seen.setdefault(id(a), a)
    return list(seen.values())


def estimate_lipschitz(f, z, cfg: SemanticsConfig, max_points: int = 64) -> LipschitzConstants:
    """Empirical Lipschitz constants on a grid of ``10 * ceil(tau / delta_until)`` points per atom.

    The time constant is measured over points visited by the trajectory,
    which is where the bound uses it.
    """
    k_traj = z.lipschitz()
    k_space = k_time = 0.0
    idx = np.unique(np.linspace(0, len(z) - 1, min(len(z), max_points)).round().astype(int))
    probe_t = np.unique(np.concatenate([z.times[idx], np.linspace(0.0, z.horizon, max_points)]))
    xs = z(probe_t)
    for atom in _distinct_atoms(f):
        n = 10 * math.ceil(atom.horizon / cfg.delta_until)
        grid = np.unique(np.concatenate([np.linspace(0.0, atom.horizon, n + 1), atom.breakpoints()]))
        k_space = max(k_space, float(np.max(space_lipschitz(atom, grid, cfg.metric))))
        tt = np.broadcast_to(grid, (len(xs), len(grid)))
        pts = np.broadcast_to(xs[:, None, :], (len(xs), len(grid), xs.shape[1]))
        d = distances(pts, atom, tt, cfg.metric)
        if len(grid) > 1:
            q = np.abs(np.diff(d, axis=1)) / np.diff(grid)
            k_time = max(k_time, float(np.max(q)))
    return LipschitzConstants(k_traj, k_space, k_time, estimated=True)


def bound_constants(f, z, cfg, lip: LipschitzConstants):
    """``(C, C1, C2)`` of the discretization error bounds."""
    c = lip.k_space * lip.k_traj
    c2 = c + lip.k_time
    x0 = z(0.0)
    c1 = 0.0
    for atom in atoms(f):
        d0 = 0.0 if atom.is_top else float(distances(x0[None, :], atom, np.zeros(1), cfg.metric)[0])
        c1 = max(c1, d0 + (lip.k_time + lip.k_traj * lip.k_space) * min(z.horizon, atom.horizon))
    return c, c1, c2


def error_bound(f, z, cfg: SemanticsConfig, lip: Optional[LipschitzConstants] = None,
                include_quadrature: bool = True) -> float:
    """Bound on ``|compute_semantics - exact semantics|``.

    ``k (C2 + C) delta`` for max semantics (k = number of untils) and
    ``k (C1 + k C nu) delta`` for integral semantics (k = number of
    concatenations and untils). With ``include_quadrature`` the error of
    sampling each atom at ``delta_atom`` is added.
    """
    if not is_lnf(f):
        f = to_lnf(f)
    k_until, k_cat, hmin = count_ops(f)
    delta = cfg.delta_until
    if not delta < hmin:
        raise BoundError(f"delta_until={delta:g} must be below the minimum atom horizon {hmin:g}")
    if lip is None:
        lip = estimate_lipschitz(f, z, cfg)
    c, c1, c2 = bound_constants(f, z, cfg, lip)
    nu = z.horizon
    if cfg.aggregator is Aggregator.MAX:
        bound = k_until * (c2 + c) * delta
    else:
        bound = k_cat * (c1 + k_cat * c * nu) * delta
    if include_quadrature and any(not a.is_top for a in atoms(f)):
        slope = lip.k_time + lip.k_space * lip.k_traj
        span = cfg.delta_atom if cfg.aggregator is Aggregator.MAX else cfg.delta_atom * nu
        bound += slope * span
    return bound


@dataclass(frozen=True)
class MonitorResult:
    value: float
    bound: Optional[float] = None


def monitor(z, f, cfg: SemanticsConfig, lip: Optional[LipschitzConstants] = None) -> MonitorResult:
    """Normalize, evaluate, and attach the error bound when ``cfg.report_bound`` is set."""
    g = f if is_lnf(f) else to_lnf(f)
    value = compute_semantics(z, g, cfg)
    bound = None
    if cfg.report_bound:
        bound = error_bound(g, z, cfg, lip)
    return MonitorResult(value, bound)
