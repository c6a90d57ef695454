"""Minimal SVG line plots and heatmaps.

Output is plain text with fixed number formatting, so identical inputs give
identical bytes.
"""

from __future__ import annotations

import math
from html import escape

import numpy as np

#: Nine-stop viridis ramp, evenly spaced on [0, 1].
COLOR_STOPS = (
    (0x44, 0x01, 0x54),
    (0x47, 0x2D, 0x7B),
    (0x3B, 0x52, 0x8B),
    (0x2C, 0x72, 0x8E),
    (0x21, 0x91, 0x8C),
    (0x28, 0xAE, 0x80),
    (0x5E, 0xC9, 0x62),
    (0xAD, 0xDC, 0x30),
    (0xFD, 0xE7, 0x25),
)
LINE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
INVALID_COLOR = "#bbbbbb"

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 150, 40, 60


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def color_for(value: float) -> str:
    """Hex color of ``value`` in [0, 1] on the ramp (linear between stops)."""
    if not math.isfinite(value):
        return INVALID_COLOR
    v = min(max(value, 0.0), 1.0) * (len(COLOR_STOPS) - 1)
    i = min(int(v), len(COLOR_STOPS) - 2)
    f = v - i
    rgb = [round(a + f * (b - a)) for a, b in zip(COLOR_STOPS[i], COLOR_STOPS[i + 1])]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


class _Axis:
    def __init__(self, lo: float, hi: float, pix_lo: float, pix_hi: float, log: bool):
        if log and (lo <= 0 or hi <= 0):
            raise ValueError("log axis needs positive limits")
        self.log = log
        self.lo, self.hi = (math.log10(lo), math.log10(hi)) if log else (lo, hi)
        if self.hi == self.lo:
            self.lo, self.hi = self.lo - 0.5, self.hi + 0.5
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def __call__(self, v):
        v = np.log10(v) if self.log else np.asarray(v, dtype=float)
        return self.pix_lo + (v - self.lo) / (self.hi - self.lo) * (self.pix_hi - self.pix_lo)

    def ticks(self):
        if self.log:
            return [10.0**k for k in range(math.ceil(self.lo - 1e-9), math.floor(self.hi + 1e-9) + 1)]
        span = self.hi - self.lo
        raw = span / 5.0
        mag = 10.0 ** math.floor(math.log10(raw))
        step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
        first = math.ceil(self.lo / step - 1e-9)
        last = math.floor(self.hi / step + 1e-9)
        return [k * step for k in range(first, last + 1)]


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.0e}"
    return f"{v:.6g}"


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2 - MARGIN_RIGHT / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]


def _axes(xa: _Axis, ya: _Axis, xlabel: str, ylabel: str) -> list[str]:
    x0, x1 = xa.pix_lo, xa.pix_hi
    y0, y1 = ya.pix_lo, ya.pix_hi
    out = [f'<rect x="{_fmt(x0)}" y="{_fmt(y1)}" width="{_fmt(x1 - x0)}" height="{_fmt(y0 - y1)}" fill="none" stroke="black"/>']
    for t in xa.ticks():
        px = float(xa(t))
        out.append(f'<line x1="{_fmt(px)}" y1="{_fmt(y0)}" x2="{_fmt(px)}" y2="{_fmt(y0 + 5)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px)}" y="{_fmt(y0 + 18)}" text-anchor="middle">{_tick_label(t)}</text>')
    for t in ya.ticks():
        py = float(ya(t))
        out.append(f'<line x1="{_fmt(x0 - 5)}" y1="{_fmt(py)}" x2="{_fmt(x0)}" y2="{_fmt(py)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x0 - 8)}" y="{_fmt(py + 4)}" text-anchor="end">{_tick_label(t)}</text>')
    out.append(f'<text x="{_fmt((x0 + x1) / 2)}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{_fmt((y0 + y1) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_fmt((y0 + y1) / 2)})">{escape(ylabel)}</text>'
    )
    return out


def line_plot(x, curves: dict, title: str = "", xlabel: str = "", ylabel: str = "", log_x: bool = False, log_y: bool = False) -> str:
    """SVG document with one polyline per entry of ``curves`` (label -> y values)."""
    x = np.asarray(x, dtype=float)
    ys = {label: np.asarray(y, dtype=float) for label, y in curves.items()}
    finite = np.concatenate([y[np.isfinite(y)] for y in ys.values()]) if ys else np.array([0.0, 1.0])
    if log_y:
        finite = finite[finite > 0]
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    xa = _Axis(float(x.min()), float(x.max()), MARGIN_LEFT, WIDTH - MARGIN_RIGHT, log_x)
    ya = _Axis(y_lo, y_hi, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP, log_y)
    out = _header(title) + _axes(xa, ya, xlabel, ylabel)
    legend_x = WIDTH - MARGIN_RIGHT + 15
    for k, (label, y) in enumerate(ys.items()):
        color = LINE_COLORS[k % len(LINE_COLORS)]
        mask = np.isfinite(y) & (y > 0 if log_y else True)
        px, py = xa(x[mask]), ya(y[mask])
        points = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        ly = MARGIN_TOP + 10 + 18 * k
        out.append(f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{legend_x + 26}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _edges(centers: np.ndarray, log: bool) -> np.ndarray:
    c = np.log10(centers) if log else centers
    if c.size == 1:
        e = np.array([c[0] - 0.5, c[0] + 0.5])
    else:
        mid = 0.5 * (c[1:] + c[:-1])
        e = np.concatenate([[c[0] - (mid[0] - c[0])], mid, [c[-1] + (c[-1] - mid[-1])]])
    return 10.0**e if log else e


def heatmap(x_axis, y_axis, values, title: str = "", xlabel: str = "", ylabel: str = "",
            log_x: bool = True, log_y: bool = True, vmin: float | None = None, vmax: float | None = None) -> str:
    """SVG heatmap of ``values[i_x, i_y]`` as a grid of rectangles plus a color bar.

    NaN cells are drawn grey.
    """
    x_axis = np.asarray(x_axis, dtype=float)
    y_axis = np.asarray(y_axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape != (x_axis.size, y_axis.size):
        raise ValueError("values must have shape (len(x_axis), len(y_axis))")
    finite = values[np.isfinite(values)]
    lo = float(finite.min()) if vmin is None and finite.size else (vmin if vmin is not None else 0.0)
    hi = float(finite.max()) if vmax is None and finite.size else (vmax if vmax is not None else 1.0)
    span = hi - lo if hi > lo else 1.0
    xe, ye = _edges(x_axis, log_x), _edges(y_axis, log_y)
    xa = _Axis(float(xe[0]), float(xe[-1]), MARGIN_LEFT, WIDTH - MARGIN_RIGHT, log_x)
    ya = _Axis(float(ye[0]), float(ye[-1]), HEIGHT - MARGIN_BOTTOM, MARGIN_TOP, log_y)
    out = _header(title)
    px, py = xa(xe), ya(ye)
    for i in range(x_axis.size):
        for j in range(y_axis.size):
            v = values[i, j]
            color = color_for((v - lo) / span) if math.isfinite(v) else INVALID_COLOR
            out.append(
                f'<rect x="{_fmt(px[i])}" y="{_fmt(py[j + 1])}" width="{_fmt(px[i + 1] - px[i])}" '
                f'height="{_fmt(py[j] - py[j + 1])}" fill="{color}"/>'
            )
    out += _axes(xa, ya, xlabel, ylabel)
    bar_x = WIDTH - MARGIN_RIGHT + 20
    top, bottom = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM
    n = 64
    h = (bottom - top) / n
    for k in range(n):
        out.append(
            f'<rect x="{bar_x}" y="{_fmt(bottom - (k + 1) * h)}" width="18" height="{_fmt(h + 0.2)}" '
            f'fill="{color_for((k + 0.5) / n)}"/>'
        )
    out.append(f'<text x="{bar_x + 24}" y="{_fmt(bottom)}">{lo:.4g}</text>')
    out.append(f'<text x="{bar_x + 24}" y="{_fmt(top + 8)}">{hi:.4g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
