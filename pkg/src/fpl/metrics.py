"""Distances between a point and the distribution an atom induces at one instant."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core.atom import DiagonalCov, DiagonalStdCov, FullCov
from .core.plf import DOMAIN_TOL

COND_LIMIT = 1e12
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)


class MetricError(ValueError):
    pass


class SingularCovariance(MetricError):
    pass


class Metric(Enum):
    MAHALANOBIS = "mahalanobis"
    MAHALANOBIS_INF = "mahalanobis-inf"
    QUANTILE_UNIFORM = "quantile-uniform"
    QUANTILE_TRIANGULAR = "quantile-triangular"
    EUCLIDEAN = "euclidean"

    @classmethod
    def parse(cls, text: str) -> "Metric":
        try:
            return cls(text.strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise MetricError(f"unknown metric {text!r}; expected one of {names}") from None

    @property
    def is_quantile(self) -> bool:
        return self in (Metric.QUANTILE_UNIFORM, Metric.QUANTILE_TRIANGULAR)


def _check_times(atom, times):
    if np.any(times < -DOMAIN_TOL) or np.any(times > atom.horizon + DOMAIN_TOL):
        raise MetricError(f"time outside the horizon [0, {atom.horizon:g}] of {atom.name}")


def _full_mahalanobis(diff, mats):
    cond = np.linalg.cond(mats)
    if np.any(~np.isfinite(cond)) or np.any(cond > COND_LIMIT):
        raise SingularCovariance(f"covariance condition number {np.max(cond):.3g} exceeds {COND_LIMIT:g}")
    sol = np.linalg.solve(mats, diff[..., None])[..., 0]
    q = np.einsum("...i,...i->...", diff, sol)
    return np.sqrt(np.maximum(q, 0.0))


def _quantile(dev, std, metric):
    with np.errstate(divide="ignore", invalid="ignore"):
        if metric is Metric.QUANTILE_UNIFORM:
            r = np.minimum(dev / (SQRT3 * std), 1.0)
        else:
            h = SQRT6 * std
            u = np.minimum(dev / h, 1.0)
            r = 1.0 - (1.0 - u) ** 2
    return np.where(np.isinf(std), 0.0, r)


def distances(points, atom, times, metric: Metric) -> np.ndarray:
    """Vectorized distance of ``points[k]`` to ``atom`` at ``times[k]``."""
    times = np.asarray(times, dtype=float)
    points = np.asarray(points, dtype=float)
    if atom.is_top:
        return np.zeros(times.shape)
    _check_times(atom, times)
    times = np.clip(times, 0.0, atom.horizon)
    diff = points - atom.mean_on(times)
    if metric is Metric.EUCLIDEAN:
        return np.sqrt(np.sum(diff * diff, axis=-1))
    cov = atom.cov
    if metric is Metric.MAHALANOBIS and isinstance(cov, FullCov):
        return _full_mahalanobis(diff, cov.matrices_on(times))
    if metric.is_quantile and not cov.diagonal:
        raise MetricError("quantile distances require a diagonal covariance")
    var = cov.variances_on(times)
    if metric is Metric.MAHALANOBIS:
        with np.errstate(invalid="ignore"):
            q = np.where(np.isinf(var), 0.0, diff * diff / var)
        return np.sqrt(np.sum(q, axis=-1))
    std = np.sqrt(var)
    dev = np.abs(diff)
    if metric is Metric.MAHALANOBIS_INF:
        with np.errstate(invalid="ignore"):
            r = np.where(np.isinf(std), 0.0, dev / std)
        return np.max(r, axis=-1)
    return np.max(_quantile(dev, std, metric), axis=-1)


def point_distance(x, atom, t, metric: Metric) -> float:
    """Distance of point ``x`` to the point-atom ``atom(t)``."""
    x = np.asarray(x, dtype=float)[None, :]
    return float(distances(x, atom, np.array([float(t)]), metric)[0])


def space_lipschitz(atom, times, metric: Metric) -> np.ndarray:
    """Lipschitz constant of ``x -> d(x, atom(t))`` at each of ``times``.

    Each value is exact for the metric at that instant (largest directional
    derivative), so a maximum over a grid is an estimate over the horizon.
    """
    times = np.asarray(times, dtype=float)
    if atom.is_top:
        return np.zeros(times.shape)
    if metric is Metric.EUCLIDEAN:
        return np.ones(times.shape)
    times = np.clip(times, 0.0, atom.horizon)
    cov = atom.cov
    if metric is Metric.MAHALANOBIS and isinstance(cov, FullCov):
        eig = np.linalg.eigvalsh(cov.matrices_on(times))
        return 1.0 / np.sqrt(eig[..., 0])
    var = cov.variances_on(times)
    with np.errstate(divide="ignore"):
        inv_std = np.where(np.isinf(var), 0.0, 1.0 / np.sqrt(var))
    if metric in (Metric.MAHALANOBIS, Metric.MAHALANOBIS_INF):
        return np.max(inv_std, axis=-1)
    if metric is Metric.QUANTILE_UNIFORM:
        return np.max(inv_std, axis=-1) / SQRT3
    return 2.0 * np.max(inv_std, axis=-1) / SQRT6


@dataclass(frozen=True)
class CurveSegment:
    """Distance on ``[start, end]`` where every input is a single linear piece.

    For diagonal Mahalanobis, ``d(t)**2 = sum_i (a_i + b_i t)**2 / q_i(t)`` with
    ``q_i`` a polynomial in t (coefficients highest power first).
    """

    start: float
    end: float
    numerators: tuple = ()
    denominators: tuple = ()

    @property
    def rational(self) -> bool:
        return bool(self.numerators)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        total = np.zeros(t.shape)
        for (a, b), q in zip(self.numerators, self.denominators):
            if q is None:
                continue
            total = total + (a + b * t) ** 2 / np.polyval(q, t)
        return np.sqrt(total)


@dataclass(frozen=True)
class DistanceCurve:
    """``t -> d(z(t), atom(t))`` on ``[0, tau]``, sampled plus per-segment structure."""

    trajectory: object
    atom: object
    metric: Metric
    times: np.ndarray
    values: np.ndarray
    segments: tuple

    def __call__(self, t):
        ta = np.atleast_1d(np.asarray(t, dtype=float))
        out = distances(self.trajectory(ta), self.atom, ta, self.metric)
        return float(out[0]) if np.ndim(t) == 0 else out

    def max_slope(self) -> float:
        if len(self.times) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.values) / np.diff(self.times))))


def _line_on(times, values, t0, t1):
    v0, v1 = np.interp([t0, t1], times, values)
    b = (v1 - v0) / (t1 - t0)
    return v0 - b * t0, b


def closed_form_distance_curve(z, atom, metric: Metric, step: float | None = None) -> DistanceCurve:
    """Distance curve of trajectory ``z`` against ``atom`` over the atom's horizon.

    Segment boundaries are the union of breakpoints of the trajectory, the mean
    and the covariance. Diagonal Mahalanobis segments carry the exact rational
    form; other metrics carry only the boundaries.
    """
    tau = atom.horizon
    if z.horizon < tau - DOMAIN_TOL:
        raise MetricError("trajectory shorter than the atom horizon")
    knots = set(atom.breakpoints().tolist())
    knots.update(t for t in z.times.tolist() if t <= tau + DOMAIN_TOL)
    knots = np.array(sorted(min(k, tau) for k in knots))
    knots = np.unique(knots)
    grid = knots
    if step:
        grid = np.unique(np.concatenate([knots, np.arange(0.0, tau, step), [tau]]))
    values = distances(z(grid), atom, grid, metric)

    segments = []
    diag_mahal = (metric is Metric.MAHALANOBIS and not atom.is_top
                  and isinstance(atom.cov, (DiagonalCov, DiagonalStdCov)))
    for t0, t1 in zip(knots[:-1], knots[1:]):
        if not diag_mahal:
            segments.append(CurveSegment(float(t0), float(t1)))
            continue
        nums, dens = [], []
        for i in range(atom.dim):
            za, zb = _line_on(z.times, z.points[:, i], t0, t1)
            mf = atom.mean[i]
            ma, mb = _line_on(mf.times, mf.values, t0, t1) if len(mf.times) > 1 else (mf.values[0], 0.0)
            nums.append((za - ma, zb - mb))
            cf = atom.cov.functions[i]
            if cf.is_infinite:
                dens.append(None)
                continue
            ca, cb = _line_on(cf.times, cf.values, t0, t1)
            if isinstance(atom.cov, DiagonalStdCov):
                dens.append((cb * cb, 2 * ca * cb, ca * ca))
            else:
                dens.append((cb, ca))
        segments.append(CurveSegment(float(t0), float(t1), tuple(nums), tuple(dens)))
    return DistanceCurve(z, atom, metric, grid, values, tuple(segments))
