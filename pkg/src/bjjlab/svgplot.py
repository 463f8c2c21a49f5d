"""Minimal self-contained SVG line plots (axes, ticks, polylines, legend)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 78, 20, 36, 56
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
DASHES = ("", "6,4", "2,3", "8,3,2,3")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float) -> list[float]:
    a, b = math.floor(lo), math.ceil(hi)
    step = max(1, math.ceil((b - a) / 8))
    return [float(e) for e in range(a, b + 1, step) if lo - 1e-9 <= e <= hi + 1e-9]


def _fmt_tick(v: float, log: bool) -> str:
    if log:
        return f"1e{int(round(v))}"
    return f"{v:g}"


def line_plot(curves, *, title: str = "", xlabel: str = "", ylabel: str = "",
              xlog: bool = False, ylog: bool = False) -> str:
    """Render ``curves`` (sequence of ``(label, x, y)``) as an SVG document string."""
    prepared = []
    for label, x, y in curves:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if xlog:
            ok &= x > 0
        if ylog:
            ok &= y > 0
        x, y = x[ok], y[ok]
        prepared.append((label, np.log10(x) if xlog else x, np.log10(y) if ylog else y))
    xs = np.concatenate([c[1] for c in prepared if c[1].size]) if prepared else np.array([0.0, 1.0])
    ys = np.concatenate([c[2] for c in prepared if c[2].size]) if prepared else np.array([0.0, 1.0])
    if xs.size == 0:
        xs, ys = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.04 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN_T + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    xticks = _log_ticks(x0, x1) if xlog else _nice_ticks(x0, x1)
    yticks = _log_ticks(y0, y1) if ylog else _nice_ticks(y0, y1)
    for t in xticks:
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{MARGIN_T + ph}" x2="{X:.2f}" y2="{MARGIN_T + ph - 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{MARGIN_T + ph + 16}" text-anchor="middle">{_fmt_tick(t, xlog)}</text>')
    for t in yticks:
        Y = py(t)
        out.append(f'<line x1="{MARGIN_L}" y1="{Y:.2f}" x2="{MARGIN_L + 5}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 6}" y="{Y + 4:.2f}" text-anchor="end">{_fmt_tick(t, ylog)}</text>')
    for i, (label, x, y) in enumerate(prepared):
        if x.size == 0:
            continue
        color = COLORS[i % len(COLORS)]
        dash = DASHES[(i // len(COLORS)) % len(DASHES)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{pts}"/>')
        ly = MARGIN_T + 14 + 16 * i
        lx = MARGIN_L + pw - 150
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" stroke="{color}" stroke-width="1.5"{dash_attr}/>')
        out.append(f'<text x="{lx + 30}" y="{ly}">{escape(label)}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2}" y="{HEIGHT - 14}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{MARGIN_T + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + ph / 2})">{escape(ylabel)}</text>'
    )
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
