"""Minimal self-contained SVG line and scatter charts."""

from __future__ import annotations

import datetime as dt
from html import escape

import numpy as np

WIDTH, HEIGHT = 800, 420
MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 50}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _numeric(x):
    x = np.asarray(x)
    if np.issubdtype(x.dtype, np.datetime64):
        return x.astype("datetime64[D]").astype(np.int64).astype(float), True
    return x.astype(float), False


def _scale(lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (np.asarray(v, dtype=float) - lo) / span * (b - a)


def _fmt(v, is_date):
    if is_date:
        return str(np.datetime64(int(round(v)), "D"))
    return f"{v:.4g}"


def _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi, x_is_date):
    left, top = MARGIN["left"], MARGIN["top"]
    right, bottom = WIDTH - MARGIN["right"], HEIGHT - MARGIN["bottom"]
    stamp = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f"<metadata>generated {stamp}</metadata>",
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
        f'<text x="{(left + right) / 2}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="16" y="{(top + bottom) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(top + bottom) / 2})">{escape(ylabel)}</text>',
    ]
    sx = _scale(xlo, xhi, left, right)
    sy = _scale(ylo, yhi, bottom, top)
    for frac in np.linspace(0, 1, 5):
        xv = xlo + frac * (xhi - xlo)
        yv = ylo + frac * (yhi - ylo)
        px, py = float(sx(xv)), float(sy(yv))
        parts.append(f'<text x="{px:.1f}" y="{bottom + 16}" text-anchor="middle">{_fmt(xv, x_is_date)}</text>')
        parts.append(f'<text x="{left - 6}" y="{py + 4:.1f}" text-anchor="end">{_fmt(yv, False)}</text>')
        parts.append(f'<line x1="{left}" y1="{py:.1f}" x2="{right}" y2="{py:.1f}" stroke="#eee"/>')
    return parts, sx, sy


def _bounds(series):
    xs = np.concatenate([_numeric(x)[0] for x, _ in series])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series])
    ys = ys[np.isfinite(ys)]
    ylo, yhi = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    pad = 0.05 * (yhi - ylo or 1.0)
    return float(xs.min()), float(xs.max()), ylo - pad, yhi + pad


def _legend(parts, names):
    for k, name in enumerate(names):
        y = MARGIN["top"] + 4 + 14 * k
        x = WIDTH - MARGIN["right"] - 150
        parts.append(f'<rect x="{x}" y="{y}" width="10" height="10" fill="{PALETTE[k % len(PALETTE)]}"/>')
        parts.append(f'<text x="{x + 14}" y="{y + 9}">{escape(name)}</text>')


def line_chart(series: dict, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """``series`` maps a legend name to an ``(x, y)`` pair; NaNs break the line."""
    items = list(series.items())
    xlo, xhi, ylo, yhi = _bounds([v for _, v in items])
    x_is_date = _numeric(items[0][1][0])[1]
    parts, sx, sy = _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi, x_is_date)
    for k, (_, (x, y)) in enumerate(items):
        px, py = sx(_numeric(x)[0]), sy(np.asarray(y, dtype=float))
        runs, cur = [], []
        for a, b in zip(px, py):
            if np.isfinite(b):
                cur.append(f"{a:.1f},{b:.1f}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        for run in runs:
            parts.append(
                f'<polyline fill="none" stroke="{PALETTE[k % len(PALETTE)]}" stroke-width="1.2" points="{" ".join(run)}"/>'
            )
    _legend(parts, [name for name, _ in items])
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def scatter_chart(x, y, title: str = "", xlabel: str = "", ylabel: str = "", highlight: dict | None = None) -> str:
    """Point cloud with optional named highlight points ``{name: (x, y)}``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pts = [(x, y)] + [(np.array([hx]), np.array([hy])) for hx, hy in (highlight or {}).values()]
    xlo, xhi, ylo, yhi = _bounds(pts)
    parts, sx, sy = _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi, False)
    step = max(1, len(x) // 3000)
    for a, b in zip(sx(x[::step]), sy(y[::step])):
        parts.append(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="1.5" fill="{PALETTE[0]}" fill-opacity="0.4"/>')
    for k, (name, (hx, hy)) in enumerate((highlight or {}).items(), 1):
        parts.append(f'<circle cx="{float(sx(hx)):.1f}" cy="{float(sy(hy)):.1f}" r="5" fill="{PALETTE[k % len(PALETTE)]}"/>')
    _legend(parts, ["samples", *(highlight or {})])
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
