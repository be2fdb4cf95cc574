"""Atoms: time-varying distributions given by a mean and a covariance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .plf import DOMAIN_TOL, PiecewiseLinearFn


class AtomError(ValueError):
    """An atom definition violates its invariants."""


def _union_times(fns, start, end):
    ts = {start, end}
    for f in fns:
        ts.update(t for t in f.times.tolist() if start - DOMAIN_TOL <= t <= end + DOMAIN_TOL)
    return np.array(sorted(ts))


@dataclass(frozen=True)
class DiagonalCov:
    """Independent signals; one variance function per dimension."""

    variances: tuple

    kind = "diagonal"
    diagonal = True

    def __post_init__(self):
        for f in self.variances:
            if not f.is_infinite and np.any(f.values <= 0):
                raise AtomError("diagonal variances must be > 0 at every breakpoint")

    @property
    def functions(self):
        return self.variances

    def variances_on(self, times):
        return np.stack([f(times) for f in self.variances], axis=-1)

    def matrices_on(self, times):
        v = self.variances_on(times)
        return v[..., :, None] * np.eye(v.shape[-1])

    def restrict(self, start, end):
        return DiagonalCov(tuple(f.restrict(start, end) for f in self.variances))


@dataclass(frozen=True)
class DiagonalStdCov:
    """Diagonal covariance parametrized by piecewise-linear standard deviations.

    Variance is then piecewise quadratic, which covers bands whose width shrinks
    linearly (for instance ``std(t) = 1/2 - t/12``) without approximation.
    """

    stds: tuple

    kind = "diagonal-std"
    diagonal = True

    def __post_init__(self):
        for f in self.stds:
            if not f.is_infinite and np.any(f.values <= 0):
                raise AtomError("standard deviations must be > 0 at every breakpoint")

    @property
    def functions(self):
        return self.stds

    def variances_on(self, times):
        s = np.stack([f(times) for f in self.stds], axis=-1)
        return s * s

    def matrices_on(self, times):
        v = self.variances_on(times)
        return v[..., :, None] * np.eye(v.shape[-1])

    def restrict(self, start, end):
        return DiagonalStdCov(tuple(f.restrict(start, end) for f in self.stds))


@dataclass(frozen=True)
class FullCov:
    """Full covariance matrix with one function per entry (row-major tuple of rows)."""

    entries: tuple

    kind = "full"
    diagonal = False

    def __post_init__(self):
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise AtomError("full covariance must be square")
        flat = [f for row in self.entries for f in row]
        if any(f.is_infinite for f in flat):
            raise AtomError("infinite entries are not allowed in a full covariance")
        start = min(f.start for f in flat)
        end = max(f.end for f in flat)
        ts = _union_times(flat, start, end)
        mats = self.matrices_on(ts)
        if not np.allclose(mats, np.swapaxes(mats, -1, -2), rtol=0, atol=1e-12):
            raise AtomError("full covariance must be symmetric at every breakpoint")
        for t, m in zip(ts, mats):
            try:
                np.linalg.cholesky(m)
            except np.linalg.LinAlgError:
                raise AtomError(f"covariance is not positive definite at t={t:g}") from None

    @property
    def functions(self):
        return tuple(f for row in self.entries for f in row)

    def variances_on(self, times):
        n = len(self.entries)
        return np.stack([self.entries[i][i](times) for i in range(n)], axis=-1)

    def matrices_on(self, times):
        rows = [np.stack([f(times) for f in row], axis=-1) for row in self.entries]
        return np.stack(rows, axis=-2)

    def restrict(self, start, end):
        return FullCov(tuple(tuple(f.restrict(start, end) for f in row) for row in self.entries))


Covariance = Union[DiagonalCov, DiagonalStdCov, FullCov]


@dataclass(frozen=True, eq=False)
class Atom:
    """A distribution over R^n whose mean and covariance evolve on ``[0, horizon]``."""

    name: str
    horizon: float
    mean: tuple
    cov: Covariance

    is_top = False

    def __post_init__(self):
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "mean", tuple(self.mean))
        if self.horizon < 0:
            raise AtomError(f"atom {self.name!r}: horizon must be non-negative")
        if not self.mean:
            raise AtomError(f"atom {self.name!r}: at least one dimension is required")
        fns = list(self.mean) + list(self.cov.functions)
        for f in fns:
            if abs(f.start) > DOMAIN_TOL or abs(f.end - self.horizon) > DOMAIN_TOL:
                raise AtomError(
                    f"atom {self.name!r}: every component must have domain [0, {self.horizon:g}]"
                )
        for f in self.mean:
            if f.is_infinite:
                raise AtomError(f"atom {self.name!r}: mean must be finite")
        ncov = len(self.cov.entries) if isinstance(self.cov, FullCov) else len(self.cov.functions)
        if ncov != len(self.mean):
            raise AtomError(f"atom {self.name!r}: covariance size does not match mean")

    @property
    def dim(self) -> int:
        return len(self.mean)

    def breakpoints(self) -> np.ndarray:
        return _union_times(list(self.mean) + list(self.cov.functions), 0.0, self.horizon)

    def mean_on(self, times) -> np.ndarray:
        return np.stack([f(times) for f in self.mean], axis=-1)

    def mean_at(self, t) -> np.ndarray:
        return self.mean_on(np.asarray([t], dtype=float))[0]

    def cov_at(self, t) -> np.ndarray:
        return self.cov.matrices_on(np.asarray([t], dtype=float))[0]

    def truncate(self, t) -> "Atom":
        """Initial part of the atom on ``[0, t]``."""
        if t < -DOMAIN_TOL or t > self.horizon + DOMAIN_TOL:
            raise AtomError(f"cannot truncate {self.name!r} (horizon {self.horizon:g}) at {t:g}")
        t = min(max(t, 0.0), self.horizon)
        if t == self.horizon:
            return self
        return Atom(
            self.name,
            t,
            tuple(f.restrict(0.0, t) for f in self.mean),
            self.cov.restrict(0.0, t),
        )

    def __repr__(self):
        return f"Atom({self.name!r}, horizon={self.horizon:g}, dim={self.dim}, cov={self.cov.kind})"


@dataclass(frozen=True)
class TopAtom:
    """The true atom: zero mean and infinite variance in every direction."""

    horizon: float
    dim: int

    is_top = True

    def __post_init__(self):
        object.__setattr__(self, "horizon", float(self.horizon))
        if self.horizon < 0:
            raise AtomError("TOP horizon must be non-negative")

    @property
    def name(self) -> str:
        return f"TOP[{format_number(self.horizon)}]"

    def breakpoints(self) -> np.ndarray:
        return np.array([0.0, self.horizon]) if self.horizon > 0 else np.array([0.0])

    def mean_on(self, times) -> np.ndarray:
        return np.zeros(np.shape(times) + (self.dim,))

    def mean_at(self, t) -> np.ndarray:
        return np.zeros(self.dim)

    def cov_at(self, t) -> np.ndarray:
        return np.diag(np.full(self.dim, math.inf))

    def truncate(self, t) -> "TopAtom":
        if t < -DOMAIN_TOL or t > self.horizon + DOMAIN_TOL:
            raise AtomError(f"cannot truncate TOP (horizon {self.horizon:g}) at {t:g}")
        return TopAtom(min(max(t, 0.0), self.horizon), self.dim)


AnyAtom = Union[Atom, TopAtom]


def format_number(x: float) -> str:
    """Shortest text that parses back to the same float; integers print bare."""
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def atom_truncate(a: AnyAtom, t: float) -> AnyAtom:
    return a.truncate(t)


def linear_atom(name: str, intercepts: Sequence[float], slopes: Sequence[float],
                stds: Sequence[float], horizon: float) -> Atom:
    """Atom with linear mean ``a_i + b_i t`` and constant diagonal variance ``std_i**2``."""
    mean = tuple(PiecewiseLinearFn.linear(a, b, 0.0, horizon) for a, b in zip(intercepts, slopes))
    var = tuple(PiecewiseLinearFn.constant(s * s, 0.0, horizon) for s in stds)
    return Atom(name, horizon, mean, DiagonalCov(var))
