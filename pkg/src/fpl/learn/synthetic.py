"""Seeded synthetic demonstration sets with known phase structure (1-D, unit sampling)."""

from __future__ import annotations

import numpy as np

from ..core.trajectory import Trajectory


def _make(t, x, rng, noise):
    return Trajectory(t, (x + rng.normal(0.0, noise, size=x.shape))[:, None])


def rest_move_rest(n=20, seed=0, noise=0.1, rest=50.0, jitter=4.0, move=50.0, move_jitter=3.0,
                   total=200.0, dt=1.0):
    """Rest near 0, move at unit speed for about ``move`` seconds, rest again."""
    rng = np.random.default_rng(seed)
    t = np.arange(0.0, total + dt / 2, dt)
    out = []
    for _ in range(n):
        t0 = rest + rng.uniform(0.0, jitter)
        x = np.clip(t - t0, 0.0, move + rng.uniform(-move_jitter, move_jitter))
        out.append(_make(t, x, rng, noise))
    return out


def rest_then_branch(n=20, seed=0, noise=0.1, rest=50.0, jitter=2.0, total=200.0, dt=1.0):
    """Rest near 0, then half move at speed +1 and half at -1."""
    rng = np.random.default_rng(seed)
    t = np.arange(0.0, total + dt / 2, dt)
    out = []
    for i in range(n):
        sign = 1.0 if i % 2 == 0 else -1.0
        t0 = rest + rng.uniform(0.0, jitter)
        x = sign * np.maximum(t - t0, 0.0)
        out.append(_make(t, x, rng, noise))
    return out


def out_and_back(n=20, seed=0, noise=0.2, rest=100.0, jitter=3.0, reach=50.0, hold=50.0,
                 final=100.0, dt=1.0):
    """Rest at 0, travel to +reach or -reach, hold, come back and rest at 0."""
    rng = np.random.default_rng(seed)
    total = rest + jitter + 2 * reach + hold + final
    t = np.arange(0.0, total + dt / 2, dt)
    out = []
    for i in range(n):
        sign = 1.0 if i % 2 == 0 else -1.0
        t0 = rest + rng.uniform(0.0, jitter)
        t1 = t0 + reach + hold
        x = np.clip(t - t0, 0.0, reach) - np.clip(t - t1, 0.0, reach)
        out.append(_make(t, sign * x, rng, noise))
    return out
