"""Sampled trajectories with linear interpolation."""

from __future__ import annotations

import numpy as np

from .plf import DOMAIN_TOL, OutOfDomain


class Trajectory:
    """An n-dimensional signal sampled at strictly increasing times starting at 0."""

    __slots__ = ("times", "points")

    def __init__(self, times, points):
        times = np.asarray(times, dtype=float).copy()
        points = np.asarray(points, dtype=float).copy()
        if points.ndim == 1:
            points = points[:, None]
        if times.ndim != 1 or len(times) == 0:
            raise ValueError("trajectory needs at least one sample")
        if points.shape[0] != len(times):
            raise ValueError("times and points disagree in length")
        if abs(times[0]) > DOMAIN_TOL:
            raise ValueError(f"trajectory must start at t=0, got {times[0]:g}")
        times[0] = 0.0
        if np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not np.all(np.isfinite(points)):
            raise ValueError("trajectory points must be finite")
        times.flags.writeable = False
        points.flags.writeable = False
        self.times = times
        self.points = points

    @classmethod
    def from_samples(cls, samples):
        """Build from ``[(t, (x1, ..., xn)), ...]``."""
        ts = [s[0] for s in samples]
        ps = [list(np.atleast_1d(s[1])) for s in samples]
        return cls(ts, ps)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def __len__(self):
        return len(self.times)

    def __call__(self, t):
        """Linear interpolation at a scalar or an array of times; shape ``(..., n)``."""
        ta = np.asarray(t, dtype=float)
        if np.any(ta < -DOMAIN_TOL) or np.any(ta > self.horizon + DOMAIN_TOL):
            raise OutOfDomain(f"trajectory evaluated outside [0, {self.horizon:g}]")
        if len(self.times) == 1:
            return np.broadcast_to(self.points[0], ta.shape + (self.dim,)).copy()
        cols = [np.interp(ta, self.times, self.points[:, i]) for i in range(self.dim)]
        return np.stack(cols, axis=-1)

    def shift(self, delta) -> "Trajectory":
        """``t -> z(t + delta)`` on ``[0, horizon - delta]``."""
        if delta < -DOMAIN_TOL or delta > self.horizon + DOMAIN_TOL:
            raise ValueError(f"shift {delta:g} outside [0, {self.horizon:g}]")
        delta = min(max(delta, 0.0), self.horizon)
        if delta == 0.0:
            return self
        end = self.horizon - delta
        keep = self.times - delta
        keep = keep[(keep > DOMAIN_TOL) & (keep < end - DOMAIN_TOL)]
        ts = np.concatenate([[0.0], keep, [end]]) if end > DOMAIN_TOL else np.array([0.0])
        return Trajectory(ts, self(ts + delta))

    def truncate(self, horizon) -> "Trajectory":
        """Initial part on ``[0, horizon]``."""
        if horizon < -DOMAIN_TOL or horizon > self.horizon + DOMAIN_TOL:
            raise ValueError(f"truncation {horizon:g} outside [0, {self.horizon:g}]")
        horizon = min(max(horizon, 0.0), self.horizon)
        if horizon >= self.horizon:
            return self
        inner = self.times[(self.times > DOMAIN_TOL) & (self.times < horizon - DOMAIN_TOL)]
        ts = np.concatenate([[0.0], inner, [horizon]]) if horizon > DOMAIN_TOL else np.array([0.0])
        return Trajectory(ts, self(ts))

    def lipschitz(self) -> float:
        """Largest ``|dz| / dt`` over consecutive samples (exact for linear interpolation)."""
        if len(self.times) < 2:
            return 0.0
        step = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return float(np.max(step / np.diff(self.times)))

    def __repr__(self):
        return f"Trajectory(dim={self.dim}, samples={len(self)}, horizon={self.horizon:g})"


def traj_shift(z: Trajectory, delta: float) -> Trajectory:
    return z.shift(delta)
