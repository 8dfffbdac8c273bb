"""Minimal standalone SVG 1.1 line plots (axes, log scales, polylines, markers)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"]

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 150, 40, 60


@dataclass
class Series:
    x: Sequence[float]
    y: Sequence[float]
    label: str = ""
    color: Optional[str] = None
    dashed: bool = False


@dataclass
class Marker:
    x: float
    y: float
    label: str = ""
    color: Optional[str] = None


@dataclass
class Plot:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    xlog: bool = False
    ylog: bool = False
    series: List[Series] = field(default_factory=list)
    markers: List[Marker] = field(default_factory=list)

    def add(self, x, y, label="", **kw):
        self.series.append(Series(np.asarray(x, float), np.asarray(y, float), label, **kw))
        return self

    def mark(self, x, y, label="", color=None):
        self.markers.append(Marker(float(x), float(y), label, color))
        return self

    def render(self) -> str:
        return render(self)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render(self))


def _num(v: float) -> str:
    return f"{v:.2f}"


def _valid(values, log):
    v = np.asarray(values, dtype=float)
    ok = np.isfinite(v)
    if log:
        ok &= v > 0
    return v[ok]


def _range(arrays, log):
    vals = np.concatenate([a for a in arrays if a.size] or [np.array([1.0])])
    lo, hi = float(vals.min()), float(vals.max())
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def _ticks(lo, hi, log):
    if log:
        step = max(1, int(math.ceil((hi - lo) / 8)))
        first = math.ceil(lo)
        return [(e, f"1e{e}") for e in range(first, int(math.floor(hi)) + 1, step)]
    span = hi - lo
    raw = span / 6
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=mag)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * span:
        out.append((t, f"{t:.6g}"))
        t += step
    return out


def render(plot: Plot) -> str:
    xs = [_valid(s.x, plot.xlog) for s in plot.series] + [_valid([m.x for m in plot.markers], plot.xlog)]
    ys = [_valid(s.y, plot.ylog) for s in plot.series] + [_valid([m.y for m in plot.markers], plot.ylog)]
    x0, x1 = _range(xs, plot.xlog)
    y0, y1 = _range(ys, plot.ylog)
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def tx(v):
        v = math.log10(v) if plot.xlog else v
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def ty(v):
        v = math.log10(v) if plot.ylog else v
        return MARGIN_T + ph - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for v, label in _ticks(x0, x1, plot.xlog):
        px = MARGIN_L + (v - x0) / (x1 - x0) * pw
        out.append(f'<line x1="{_num(px)}" y1="{MARGIN_T + ph}" x2="{_num(px)}" '
                   f'y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_num(px)}" y="{MARGIN_T + ph + 20}" font-size="11" '
                   f'text-anchor="middle" font-family="sans-serif">{escape(label)}</text>')
    for v, label in _ticks(y0, y1, plot.ylog):
        py = MARGIN_T + ph - (v - y0) / (y1 - y0) * ph
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{_num(py)}" x2="{MARGIN_L}" '
                   f'y2="{_num(py)}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_num(py + 4)}" font-size="11" '
                   f'text-anchor="end" font-family="sans-serif">{escape(label)}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 15}" font-size="13" '
               f'text-anchor="middle" font-family="sans-serif">{escape(plot.xlabel)}</text>')
    out.append(f'<text x="20" y="{MARGIN_T + ph / 2:.2f}" font-size="13" text-anchor="middle" '
               f'font-family="sans-serif" transform="rotate(-90 20 {MARGIN_T + ph / 2:.2f})">'
               f'{escape(plot.ylabel)}</text>')
    if plot.title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="24" font-size="15" text-anchor="middle" '
                   f'font-family="sans-serif">{escape(plot.title)}</text>')

    out.append(f'<clipPath id="plotarea"><rect x="{MARGIN_L}" y="{MARGIN_T}" '
               f'width="{pw}" height="{ph}"/></clipPath>')
    for k, s in enumerate(plot.series):
        color = s.color or PALETTE[k % len(PALETTE)]
        x = np.asarray(s.x, float)
        y = np.asarray(s.y, float)
        ok = np.isfinite(x) & np.isfinite(y)
        if plot.xlog:
            ok &= x > 0
        if plot.ylog:
            ok &= y > 0
        pts = " ".join(f"{_num(tx(a))},{_num(ty(b))}" for a, b in zip(x[ok], y[ok]))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"{dash} clip-path="url(#plotarea)"/>')
        if s.label:
            ly = MARGIN_T + 15 + 18 * k
            lx = WIDTH - MARGIN_R + 10
            out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
                       f'stroke-width="1.5"{dash}/>')
            out.append(f'<text x="{lx + 25}" y="{ly + 4}" font-size="11" '
                       f'font-family="sans-serif">{escape(s.label)}</text>')
    for m in plot.markers:
        if (plot.xlog and m.x <= 0) or (plot.ylog and m.y <= 0):
            continue
        color = m.color or "black"
        out.append(f'<circle cx="{_num(tx(m.x))}" cy="{_num(ty(m.y))}" r="4" fill="none" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        if m.label:
            out.append(f'<text x="{_num(tx(m.x) + 6)}" y="{_num(ty(m.y) - 6)}" font-size="10" '
                       f'font-family="sans-serif" fill="{color}">{escape(m.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
