"""Deterministic clustering of trajectories by their initial behavior."""

from __future__ import annotations

import numpy as np

from .config import LearnError


def initial_features(data, k: int) -> np.ndarray:
    """Rows of the first ``k`` samples of each trajectory, flattened."""
    short = [i for i, z in enumerate(data) if len(z) < k]
    if short:
        raise LearnError(f"trajectory {short[0]} has fewer than {k} samples")
    return np.stack([z.points[:k].ravel() for z in data])


def pooled_std(x: np.ndarray) -> float:
    """Root mean square over features of the across-trajectory std."""
    if len(x) < 2:
        return 0.0
    return float(np.sqrt(np.mean(np.var(x, axis=0))))


def _two_means(x, iters=50):
    d = np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=-1)
    i, j = np.unravel_index(np.argmax(d), d.shape)
    c = np.stack([x[min(i, j)], x[max(i, j)]])
    labels = np.zeros(len(x), dtype=int)
    for it in range(iters):
        dist = np.sum((x[:, None, :] - c[None, :, :]) ** 2, axis=-1)
        new = np.argmin(dist, axis=1)
        if it > 0 and np.all(new == labels):
            break
        labels = new
        for g in (0, 1):
            if np.any(labels == g):
                c[g] = x[labels == g].mean(axis=0)
    return labels, c


def _bisect(x, idx, threshold):
    if len(idx) < 2 or pooled_std(x[idx]) < threshold:
        return [list(idx)]
    labels, c = _two_means(x[idx])
    a, b = idx[labels == 0], idx[labels == 1]
    if len(a) == 0 or len(b) == 0:
        return [list(idx)]
    within = np.sqrt(np.mean(np.concatenate([
        np.var(x[a], axis=0), np.var(x[b], axis=0)])))
    gap = float(np.sqrt(np.mean((c[0] - c[1]) ** 2)))
    if not gap > 2.0 * within:
        return [list(idx)]
    return _bisect(x, a, threshold) + _bisect(x, b, threshold)


def cluster_trajectories(data, k: int, std_threshold: float = 1.0) -> list:
    """Partition ``data`` (list of trajectories) into lists of indices.

    No split happens when the pooled std of the first ``k`` samples is below
    ``std_threshold``; otherwise clusters are bisected with 2-means while the
    centroids are more than twice the within-cluster std apart. Clusters are
    ordered by their smallest member index.
    """
    if not data:
        return []
    x = initial_features(data, k)
    parts = _bisect(x, np.arange(len(data)), std_threshold)
    return sorted((sorted(int(i) for i in p) for p in parts), key=lambda p: p[0])
