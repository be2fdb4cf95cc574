"""Deterministic SVG plots of trajectories and atom mean curves with one-std bands."""

from __future__ import annotations

from pathlib import Path

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
MARGIN = 40


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Frame:
    def __init__(self, tmin, tmax, ymin, ymax, width, height):
        if tmax <= tmin:
            tmax = tmin + 1.0
        if ymax <= ymin:
            ymin, ymax = ymin - 1.0, ymax + 1.0
        self.t0, self.t1, self.y0, self.y1 = tmin, tmax, ymin, ymax
        self.w, self.h = width, height

    def xy(self, t, y):
        px = MARGIN + (t - self.t0) / (self.t1 - self.t0) * (self.w - 2 * MARGIN)
        py = self.h - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (self.h - 2 * MARGIN)
        return px, py

    def points(self, ts, ys):
        return " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (self.xy(t, y) for t, y in zip(ts, ys)))


def _atom_curves(atom, offset, dim, samples=64):
    t = np.linspace(0.0, atom.horizon, samples)
    mean = atom.mean_on(t)[:, dim]
    if atom.is_top:
        std = np.zeros_like(t)
    else:
        var = atom.cov.variances_on(t)[:, dim]
        std = np.where(np.isfinite(var), np.sqrt(np.where(np.isfinite(var), var, 0.0)), 0.0)
    return t + offset, mean, std


def render_svg(atoms=(), trajectories=(), offsets=None, dim: int = 0,
               width: int = 640, height: int = 400, title: str = "") -> str:
    """SVG text: thin polylines for trajectories, thick mean lines and bands for atoms.

    ``offsets`` places each atom on the time axis (default 0). Output
    depends only on the inputs.
    """
    atoms = list(atoms)
    offsets = list(offsets) if offsets is not None else [0.0] * len(atoms)
    curves = [_atom_curves(a, o, dim) for a, o in zip(atoms, offsets)]
    ts, ys = [], []
    for z in trajectories:
        ts.extend([z.times[0], z.times[-1]])
        ys.extend(z.points[:, dim].tolist())
    for t, m, s in curves:
        ts.extend([t[0], t[-1]])
        ys.extend((m - s).tolist() + (m + s).tolist())
    if not ts:
        ts, ys = [0.0, 1.0], [0.0, 1.0]
    fr = _Frame(min(ts), max(ts), min(ys), max(ys), width, height)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN // 2}" font-family="sans-serif" '
                   f'font-size="14">{_escape(title)}</text>')
    x0, y0 = fr.xy(fr.t0, fr.y0)
    x1, y1 = fr.xy(fr.t1, fr.y1)
    out.append(f'<polyline fill="none" stroke="black" stroke-width="1" '
               f'points="{_fmt(x0)},{_fmt(y1)} {_fmt(x0)},{_fmt(y0)} {_fmt(x1)},{_fmt(y0)}"/>')
    for label, (px, py), anchor in (
        (f"{fr.t0:g}", (x0, y0 + 15), "middle"), (f"{fr.t1:g}", (x1, y0 + 15), "middle"),
        (f"{fr.y0:.3g}", (x0 - 5, y0), "end"), (f"{fr.y1:.3g}", (x0 - 5, y1), "end"),
    ):
        out.append(f'<text x="{_fmt(px)}" y="{_fmt(py)}" font-family="sans-serif" font-size="10" '
                   f'text-anchor="{anchor}">{label}</text>')
    for z in trajectories:
        out.append(f'<polyline fill="none" stroke="#888888" stroke-width="0.8" stroke-opacity="0.6" '
                   f'points="{fr.points(z.times, z.points[:, dim])}"/>')
    for i, (atom, (t, m, s)) in enumerate(zip(atoms, curves)):
        color = PALETTE[i % len(PALETTE)]
        band = fr.points(np.concatenate([t, t[::-1]]), np.concatenate([m + s, (m - s)[::-1]]))
        out.append(f'<polygon fill="{color}" fill-opacity="0.25" stroke="none" points="{band}"/>')
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="3" points="{fr.points(t, m)}"/>')
        lx, ly = fr.xy(t[-1], m[-1])
        out.append(f'<text x="{_fmt(lx + 3)}" y="{_fmt(ly)}" font-family="sans-serif" font-size="11" '
                   f'fill="{color}">{_escape(atom.name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg(path, atoms=(), trajectories=(), **kw) -> str:
    text = render_svg(atoms, trajectories, **kw)
    Path(path).write_text(text, encoding="utf-8")
    return text


def dag_offsets(dag) -> dict:
    """Start time of each learned node: latest parent start plus the middle of its switch interval."""
    from .learn.dag import START

    start = {START: 0.0}
    for u in dag.topo_order():
        if u == START or u not in dag.nodes:
            continue
        cands = []
        for p in dag.parents[u]:
            if p == START:
                cands.append(0.0)
            else:
                n = dag.nodes[p]
                lo, hi = n.interval if n.interval is not None else (n.atom.horizon,) * 2
                cands.append(start[p] + 0.5 * (lo + hi))
        start[u] = max(cands) if cands else 0.0
    del start[START]
    return start


__all__ = ["render_svg", "emit_svg", "dag_offsets"]
