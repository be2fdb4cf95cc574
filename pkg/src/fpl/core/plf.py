"""Piecewise-linear scalar functions of time."""

from __future__ import annotations

import math

import numpy as np

# Absorbs float drift accumulated by chains of shift/truncate.
DOMAIN_TOL = 1e-12


class OutOfDomain(ValueError):
    """Raised when a function of time is evaluated outside its domain."""


class PiecewiseLinearFn:
    """Scalar function given by breakpoints ``(t_k, v_k)``.

    Values are linearly interpolated between breakpoints. The only legal
    infinite function is the constant ``+inf`` one, which is what the
    variance of the true atom looks like.
    """

    __slots__ = ("_t", "_v", "_inf")

    def __init__(self, breakpoints):
        pts = [(float(t), float(v)) for t, v in breakpoints]
        if not pts:
            raise ValueError("a piecewise-linear function needs at least one breakpoint")
        t = np.array([p[0] for p in pts])
        v = np.array([p[1] for p in pts])
        if np.any(np.isnan(t)) or np.any(np.isnan(v)) or np.any(np.isinf(t)):
            raise ValueError("breakpoint times must be finite and values not NaN")
        if np.any(np.diff(t) <= 0):
            raise ValueError("breakpoint times must be strictly increasing")
        inf = np.isinf(v)
        if inf.any() and not (inf.all() and np.all(v > 0)):
            raise ValueError("infinite values are only allowed for a constant +inf function")
        t.flags.writeable = False
        v.flags.writeable = False
        self._t = t
        self._v = v
        self._inf = bool(inf.all())

    @classmethod
    def constant(cls, value, start, end):
        if end == start:
            return cls([(start, value)])
        return cls([(start, value), (end, value)])

    @classmethod
    def linear(cls, intercept, slope, start, end):
        """``intercept + slope * (t - start)`` on ``[start, end]``."""
        if end == start:
            return cls([(start, intercept)])
        return cls([(start, intercept), (end, intercept + slope * (end - start))])

    @property
    def times(self) -> np.ndarray:
        return self._t

    @property
    def values(self) -> np.ndarray:
        return self._v

    @property
    def start(self) -> float:
        return float(self._t[0])

    @property
    def end(self) -> float:
        return float(self._t[-1])

    @property
    def is_infinite(self) -> bool:
        return self._inf

    @property
    def breakpoints(self):
        return list(zip(self._t.tolist(), self._v.tolist()))

    def _check(self, t):
        lo, hi = self._t[0] - DOMAIN_TOL, self._t[-1] + DOMAIN_TOL
        if np.any(t < lo) or np.any(t > hi):
            raise OutOfDomain(
                f"t outside [{self.start:g}, {self.end:g}]: "
                f"min={np.min(t):.17g} max={np.max(t):.17g}"
            )

    def __call__(self, t):
        """Evaluate at a scalar or an array of times."""
        scalar = np.ndim(t) == 0
        ta = np.asarray(t, dtype=float)
        self._check(ta)
        if self._inf:
            out = np.full(ta.shape, math.inf)
        elif len(self._t) == 1:
            out = np.full(ta.shape, self._v[0])
        else:
            out = np.interp(ta, self._t, self._v)
        return float(out) if scalar else out

    def max_slope(self) -> float:
        if self._inf or len(self._t) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self._v) / np.diff(self._t))))

    def restrict(self, start, end) -> "PiecewiseLinearFn":
        """Restriction to ``[start, end]``, with interpolated end breakpoints."""
        if end < start:
            raise ValueError("restrict: end before start")
        self._check(np.array([start, end]))
        start = max(start, self.start)
        end = min(end, self.end)
        inner = (self._t > start + DOMAIN_TOL) & (self._t < end - DOMAIN_TOL)
        ts = [start, *self._t[inner].tolist()]
        if end > start:
            ts.append(end)
        return PiecewiseLinearFn(zip(ts, self(np.array(ts)).tolist()))

    def shifted(self, offset) -> "PiecewiseLinearFn":
        """Same values with every breakpoint time moved by ``offset``."""
        return PiecewiseLinearFn(zip((self._t + offset).tolist(), self._v.tolist()))

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinearFn):
            return NotImplemented
        return np.array_equal(self._t, other._t) and np.array_equal(self._v, other._v)

    def __hash__(self):
        return hash((self._t.tobytes(), self._v.tobytes()))

    def __repr__(self):
        return f"PiecewiseLinearFn({self.breakpoints!r})"


def eval_plf(f: PiecewiseLinearFn, t: float) -> float:
    return f(t)
