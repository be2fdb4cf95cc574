"""Fitting linear atoms to clusters and cutting trajectories where they stop agreeing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.atom import linear_atom
from ..core.trajectory import Trajectory
from .config import LearnConfig, LearnError

STEP_TOL = 1e-9


def common_step(data) -> float:
    """Sampling period shared by every trajectory (uniform sampling is required)."""
    steps = []
    for z in data:
        if len(z) < 2:
            continue
        d = np.diff(z.times)
        if np.ptp(d) > STEP_TOL * max(1.0, d[0]):
            raise LearnError("learning needs uniformly sampled trajectories")
        steps.append(d[0])
    if not steps:
        raise LearnError("no trajectory has two samples")
    if max(steps) - min(steps) > STEP_TOL * max(1.0, steps[0]):
        raise LearnError("trajectories use different sampling periods")
    return float(steps[0])


class _LineSums:
    """Running least-squares sums for ``x_i = a_i + b_i t`` in every dimension."""

    def __init__(self, dim):
        self.n = 0
        self.st = self.stt = 0.0
        self.sx = np.zeros(dim)
        self.stx = np.zeros(dim)
        self.sxx = np.zeros(dim)

    def add(self, t, x):
        self.n += 1
        self.st += t
        self.stt += t * t
        self.sx += x
        self.stx += t * x
        self.sxx += x * x

    def fit(self, floor):
        n, st, stt = self.n, self.st, self.stt
        det = n * stt - st * st
        if det <= 0:
            b = np.zeros_like(self.sx)
        else:
            b = (n * self.stx - st * self.sx) / det
        a = (self.sx - b * st) / n
        sse = (self.sxx - 2 * a * self.sx - 2 * b * self.stx
               + a * a * n + 2 * a * b * st + b * b * stt)
        var = np.maximum(sse, 0.0) / max(n - 2, 1)
        return a, b, np.maximum(np.sqrt(var), floor)


@dataclass(frozen=True)
class AtomFit:
    atom: object
    intercepts: np.ndarray
    slopes: np.ndarray
    stds: np.ndarray
    support: int


def _residual(x, t, a, b, std):
    return np.max(np.abs(x - (a + b * t)) / std, axis=-1)


def learn_atom(cluster, cfg: LearnConfig, name: str = "A") -> AtomFit:
    """Linear fit on the first ``init_len`` samples, then grown sample by sample.

    Each step refits on the samples that agree so far. Growth stops once
    fewer than ``min_traj`` trajectories both have the next sample and have
    not deviated for ``dev_window`` consecutive samples.
    """
    k = cfg.init_len
    if len(cluster) < 1:
        raise LearnError("empty cluster")
    dim = cluster[0].dim
    dt = common_step(cluster)
    thr = cfg.threshold_for(dim)
    pts = [z.points for z in cluster]
    if any(len(p) < k for p in pts):
        raise LearnError(f"every trajectory needs at least init_len={k} samples")
    sums = _LineSums(dim)
    for p in pts:
        for j in range(k):
            sums.add(j * dt, p[j])

    active = [True] * len(pts)
    run = [0] * len(pts)
    last = k - 1
    j = k
    while True:
        cand = [i for i, p in enumerate(pts) if active[i] and len(p) > j]
        if len(cand) < cfg.min_traj:
            break
        a, b, std = sums.fit(cfg.std_floor)
        t = j * dt
        agree = []
        for i in cand:
            if _residual(pts[i][j], t, a, b, std) > thr:
                run[i] += 1
                if run[i] >= cfg.dev_window:
                    active[i] = False
            else:
                run[i] = 0
                agree.append(i)
        if sum(1 for i in cand if active[i]) < cfg.min_traj:
            break
        for i in agree:
            sums.add(t, pts[i][j])
        last = j
        j += 1

    a, b, std = sums.fit(cfg.std_floor)
    atom = linear_atom(name, a, b, std, last * dt)
    return AtomFit(atom, a, b, std, len(cluster))


@dataclass(frozen=True)
class Agreement:
    tails: list
    d_time: float
    interval: tuple
    dev_times: list


def deviation_time(z, atom, threshold: float, window: int):
    """Start of the first run of ``window`` samples beyond ``threshold`` std, or None."""
    keep = z.times <= atom.horizon + 1e-9
    t = z.times[keep]
    if len(t) == 0:
        return None
    mean = atom.mean_on(t)
    std = np.sqrt(atom.cov.variances_on(t))
    over = np.max(np.abs(z.points[keep] - mean) / std, axis=-1) > threshold
    run = 0
    for j, flag in enumerate(over):
        run = run + 1 if flag else 0
        if run >= window:
            return float(t[j - window + 1])
    return None


def _tail(z, start):
    j = int(np.searchsorted(z.times, start - 1e-9))
    if len(z) - j < 2:
        return None
    return Trajectory(z.times[j:] - z.times[j], z.points[j:])


def remove_agreement(cluster, atom, cfg: LearnConfig) -> Agreement:
    """Deviation time per trajectory, the atom's new horizon and the until interval.

    A trajectory that never deviates is cut where the atom (or the
    trajectory) ends. Tails start at each trajectory's own cut and are
    re-based to time 0; tails with fewer than two samples are dropped.
    """
    thr = cfg.threshold_for(atom.dim)
    devs = []
    for z in cluster:
        d = deviation_time(z, atom, thr, cfg.dev_window)
        devs.append(min(atom.horizon, z.horizon) if d is None else d)
    tails = [t for t in (_tail(z, d) for z, d in zip(cluster, devs)) if t is not None]
    return Agreement(tails, max(devs), (min(devs), max(devs)), devs)


def describe_atom(atom, digits: int = 2) -> str:
    """``[X_0 = a + b t, X_1 = ...]`` for atoms with linear means."""
    parts = []
    for i, f in enumerate(atom.mean):
        a = float(f(0.0))
        b = (float(f(atom.horizon)) - a) / atom.horizon if atom.horizon > 0 else 0.0
        sign = "-" if b < 0 else "+"
        parts.append(f"X_{i} = {a:.{digits}f} {sign} {abs(b):.{digits}f} t")
    return "[" + ", ".join(parts) + "]"
