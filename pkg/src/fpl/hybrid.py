"""Model checking restricted hybrid automata by enumerating their finitely many runs.

Each location has a fixed piecewise-linear evolution and a maximum dwell
time; edges fire only at listed dwell times and never reset the state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core.paths import INF
from .core.trajectory import Trajectory
from .core.formula import is_lnf
from .dsl import SchemaError, _plf_from_json
from .normalize import to_lnf
from .semantics import SemanticsConfig, compute_semantics, error_bound

TOL = 1e-9
DEFAULT_CAP = 10_000


class HybridError(ValueError):
    pass


class TooManyRuns(HybridError):
    pass


@dataclass(frozen=True)
class Location:
    name: str
    evolution: tuple
    max_dwell: float
    # "entry": evolution is a displacement added to the entry point.
    # "absolute": evolution gives the state itself.
    reference: str = "entry"

    def state(self, entry, tau):
        tau = np.asarray(tau, dtype=float)
        vals = np.stack([f(tau) for f in self.evolution], axis=-1)
        if self.reference == "entry":
            start = np.array([f.values[0] for f in self.evolution])
            return entry + (vals - start)
        return vals

    def knots(self, upto):
        ts = {0.0, float(upto)}
        for f in self.evolution:
            ts.update(float(t) for t in f.times if t < upto)
        return np.array(sorted(ts))


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    action: str
    jump_times: tuple


@dataclass(frozen=True)
class RestrictedHybridAutomaton:
    locations: dict
    edges: tuple
    init_location: str
    init_point: tuple
    horizon: float

    @property
    def dim(self) -> int:
        return len(self.init_point)

    def out_edges(self, name):
        return [e for e in self.edges if e.source == name]

    def validate(self):
        for e in self.edges:
            for end in (e.source, e.target):
                if end not in self.locations:
                    raise HybridError(f"edge {e.action!r} refers to unknown location {end!r}")
            if list(e.jump_times) != sorted(e.jump_times) or any(t <= 0 for t in e.jump_times):
                raise HybridError(f"edge {e.action!r}: jump times must be positive and ascending")
            src = self.locations[e.source]
            if any(t > src.max_dwell + TOL for t in e.jump_times):
                raise HybridError(f"edge {e.action!r}: jump time beyond maxDwell of {e.source!r}")
        if self.init_location not in self.locations:
            raise HybridError(f"unknown initial location {self.init_location!r}")
        for loc in self.locations.values():
            if len(loc.evolution) != self.dim:
                raise HybridError(f"location {loc.name!r}: evolution needs {self.dim} signals")
        init = self.locations[self.init_location]
        if init.reference == "absolute":
            _continuous(init, np.asarray(self.init_point, dtype=float), "initial point")
        # No resets: the state entering an absolute location must match its evolution at 0.
        for e in self.edges:
            dst = self.locations[e.target]
            src = self.locations[e.source]
            if dst.reference == "absolute" and src.reference == "absolute":
                for t in e.jump_times:
                    _continuous(dst, src.state(None, t), f"jump {e.action!r} at {t:g}")


def _continuous(loc, point, what):
    start = loc.state(None, 0.0)
    if np.max(np.abs(start - point)) > 1e-6:
        raise HybridError(f"{what}: state {point.tolist()} does not match the evolution "
                          f"of {loc.name!r} at entry {start.tolist()}")


def parse_automaton(data) -> RestrictedHybridAutomaton:
    try:
        obj = json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
    except json.JSONDecodeError as e:
        raise HybridError(f"invalid JSON: {e}") from None
    try:
        locs = {}
        for entry in obj["locations"]:
            name = entry["name"]
            evo = tuple(_plf_from_json(p, f"{name}.evolution[{i}]") for i, p in enumerate(entry["evolution"]))
            end = min(f.end for f in evo)
            dwell = float(entry.get("maxDwell", end))
            if dwell > end + TOL:
                raise HybridError(f"location {name!r}: maxDwell {dwell:g} exceeds its evolution")
            ref = entry.get("reference", "entry")
            if ref not in ("entry", "absolute"):
                raise HybridError(f"location {name!r}: reference must be entry or absolute")
            if name in locs:
                raise HybridError(f"duplicate location {name!r}")
            locs[name] = Location(name, evo, dwell, ref)
        edges = tuple(
            Edge(e["from"], e["to"], e.get("action", f"{e['from']}->{e['to']}"),
                 tuple(float(t) for t in e["jumpTimes"]))
            for e in obj.get("edges", [])
        )
        init = obj["init"]
        ha = RestrictedHybridAutomaton(locs, edges, init["location"],
                                       tuple(float(v) for v in init["point"]), float(obj["horizon"]))
    except (KeyError, TypeError) as e:
        raise HybridError(f"malformed automaton: {e!r}") from None
    except SchemaError as e:
        raise HybridError(str(e)) from None
    ha.validate()
    return ha


@dataclass(frozen=True)
class Run:
    id: int
    visits: tuple
    trajectory: Trajectory

    def describe(self) -> str:
        return " -> ".join(f"{name}@{t:g}" for name, t in self.visits)


def enumerate_runs(ha: RestrictedHybridAutomaton, horizon: Optional[float] = None,
                   cap: int = DEFAULT_CAP) -> list:
    """Every run of length ``horizon``: dwell to the end or jump at a listed time.

    Branches that can neither dwell to the horizon nor jump are dropped.
    """
    horizon = ha.horizon if horizon is None else float(horizon)
    if horizon > ha.horizon + TOL:
        raise HybridError(f"horizon {horizon:g} exceeds the automaton horizon {ha.horizon:g}")
    if not horizon > 0:
        raise HybridError("horizon must be positive")
    runs = []

    def emit(pieces, visits):
        if len(runs) >= cap:
            raise TooManyRuns(f"more than {cap} runs")
        ts, xs = [], []
        for start, loc, entry, length in pieces:
            tau = loc.knots(length)
            pts = loc.state(entry, tau)
            if ts:
                tau, pts = tau[1:], pts[1:]
            ts.extend(start + tau)
            xs.extend(pts)
        runs.append(Run(len(runs), tuple(visits), Trajectory(np.array(ts), np.array(xs))))

    def visit(name, start, entry, pieces, visits):
        loc = ha.locations[name]
        remaining = horizon - start
        visits = visits + [(name, start)]
        if loc.max_dwell >= remaining - TOL:
            emit(pieces + [(start, loc, entry, remaining)], visits)
        for e in ha.out_edges(name):
            for t in e.jump_times:
                if t >= remaining - TOL or t > loc.max_dwell + TOL:
                    continue
                exit_point = loc.state(entry, t)
                visit(e.target, start + t, exit_point, pieces + [(start, loc, entry, t)], visits)

    visit(ha.init_location, 0.0, np.asarray(ha.init_point, dtype=float), [], [])
    return runs


BOUND_MODES = ("ignore", "strict", "lenient")


@dataclass(frozen=True)
class RunResult:
    run: Run
    distance: float
    bound: Optional[float] = None


@dataclass(frozen=True)
class Verdict:
    all_within: bool
    worst: RunResult
    best: RunResult
    results: tuple = field(default=())
    threshold: float = INF
    bound_mode: str = "ignore"


def model_check(ha, f, theta: float, cfg: SemanticsConfig, horizon: Optional[float] = None,
                cap: int = DEFAULT_CAP, bound_mode: str = "ignore") -> Verdict:
    """Evaluate ``f`` on every run; all runs are within when each distance is at most ``theta``.

    ``bound_mode`` folds the discretization error bound into the comparison:
    ``strict`` needs ``distance + bound <= theta``, ``lenient`` accepts
    ``distance <= theta + bound``.
    """
    if bound_mode not in BOUND_MODES:
        raise ValueError(f"bound_mode must be one of {', '.join(BOUND_MODES)}")
    if not is_lnf(f):
        f = to_lnf(f)
    runs = enumerate_runs(ha, horizon, cap)
    if not runs:
        raise HybridError("the automaton has no complete run of that horizon")
    results = []
    for r in runs:
        d = compute_semantics(r.trajectory, f, cfg)
        b = None
        if bound_mode != "ignore" or cfg.report_bound:
            b = error_bound(f, r.trajectory, cfg)
        results.append(RunResult(r, d, b))

    def within(res):
        if bound_mode == "strict":
            return res.distance + res.bound <= theta
        if bound_mode == "lenient":
            return res.distance <= theta + res.bound
        return res.distance <= theta

    worst = max(results, key=lambda x: (x.distance, -x.run.id))
    best = min(results, key=lambda x: (x.distance, x.run.id))
    ok = all(within(x) for x in results) or math.isinf(theta)
    return Verdict(ok, worst, best, tuple(results), theta, bound_mode)
