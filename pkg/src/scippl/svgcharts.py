"""Minimal deterministic SVG emission: decile line charts with optional
confidence bands, and box charts.  No plotting dependency; numeric CSVs
remain the contract and these are presentation only."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

WIDTH, HEIGHT = 640, 400
MARGIN = 56
PLOT_W = WIDTH - 2 * MARGIN
PLOT_H = HEIGHT - 2 * MARGIN

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _scale(vals_min, vals_max, lo, hi, flip=False):
    span = vals_max - vals_min or 1.0

    def fn(v):
        t = (v - vals_min) / span
        if flip:
            t = 1.0 - t
        return lo + t * (hi - lo)

    return fn


def _axes(title: str, x_label: str, y_label: str,
          y_min: float, y_max: float, x_ticks: Sequence[str]) -> List[str]:
    parts = [
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" '
        f'font-size="15" font-family="sans-serif">{title}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-size="12" font-family="sans-serif">{x_label}</text>',
        f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif" transform="rotate(-90 16 {HEIGHT / 2})">{y_label}</text>',
        f'<text x="{MARGIN - 6}" y="{HEIGHT - MARGIN + 4}" text-anchor="end" '
        f'font-size="10" font-family="sans-serif">{y_min:.3g}</text>',
        f'<text x="{MARGIN - 6}" y="{MARGIN + 4}" text-anchor="end" '
        f'font-size="10" font-family="sans-serif">{y_max:.3g}</text>',
    ]
    n = len(x_ticks)
    for i, tick in enumerate(x_ticks):
        x = MARGIN + PLOT_W * (i / max(n - 1, 1))
        parts.append(f'<text x="{_fmt(x)}" y="{HEIGHT - MARGIN + 16}" '
                     f'text-anchor="middle" font-size="10" '
                     f'font-family="sans-serif">{tick}</text>')
    return parts


def line_chart(series: List[dict], title: str = "", x_label: str = "bin",
               y_label: str = "value") -> str:
    """Render line series over shared integer x positions.

    Each series dict: name, values (list of float or None), and
    optionally ci (list of (lo, hi) or None) drawn as a band.
    """
    all_vals = []
    for s in series:
        all_vals += [v for v in s["values"] if v is not None]
        for lo_hi in s.get("ci") or ():
            if lo_hi is not None:
                all_vals += list(lo_hi)
    if not all_vals:
        raise ValueError("no values to plot")
    y_min, y_max = min(all_vals), max(all_vals)
    if y_min == y_max:
        y_min, y_max = y_min - 0.5, y_max + 0.5
    n = max(len(s["values"]) for s in series)
    sx = _scale(0, max(n - 1, 1), MARGIN, WIDTH - MARGIN)
    sy = _scale(y_min, y_max, HEIGHT - MARGIN, MARGIN)
    parts = ['<svg xmlns="http://www.w3.org/2000/svg" '
             f'width="{WIDTH}" height="{HEIGHT}">',
             f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    parts += _axes(title, x_label, y_label, y_min, y_max,
                   [str(i + 1) for i in range(n)])
    for si, s in enumerate(series):
        color = _PALETTE[si % len(_PALETTE)]
        ci = s.get("ci")
        if ci:
            band = [(i, c) for i, c in enumerate(ci) if c is not None]
            if band:
                upper = " ".join(f"{_fmt(sx(i))},{_fmt(sy(c[1]))}" for i, c in band)
                lower = " ".join(f"{_fmt(sx(i))},{_fmt(sy(c[0]))}"
                                 for i, c in reversed(band))
                parts.append(f'<polygon points="{upper} {lower}" fill="{color}" '
                             f'opacity="0.15"/>')
        pts = [(i, v) for i, v in enumerate(s["values"]) if v is not None]
        poly = " ".join(f"{_fmt(sx(i))},{_fmt(sy(v))}" for i, v in pts)
        parts.append(f'<polyline points="{poly}" fill="none" stroke="{color}" '
                     f'stroke-width="2"/>')
        for i, v in pts:
            parts.append(f'<circle cx="{_fmt(sx(i))}" cy="{_fmt(sy(v))}" r="3" '
                         f'fill="{color}"/>')
        parts.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN + 14 * si + 12}" '
                     f'text-anchor="end" font-size="11" fill="{color}" '
                     f'font-family="sans-serif">{s["name"]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def box_chart(groups: List[Tuple[str, Sequence[float]]], title: str = "",
              y_label: str = "value") -> str:
    """Five-number box plots (whiskers at 1.5 IQR) for labeled groups."""
    import numpy as np

    if not groups:
        raise ValueError("no groups to plot")
    all_vals = [v for _, vals in groups for v in vals]
    y_min, y_max = min(all_vals), max(all_vals)
    if y_min == y_max:
        y_min, y_max = y_min - 0.5, y_max + 0.5
    sy = _scale(y_min, y_max, HEIGHT - MARGIN, MARGIN)
    parts = ['<svg xmlns="http://www.w3.org/2000/svg" '
             f'width="{WIDTH}" height="{HEIGHT}">',
             f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    parts += _axes(title, "", y_label, y_min, y_max, [g for g, _ in groups])
    n = len(groups)
    for i, (name, vals) in enumerate(groups):
        vals = np.asarray(vals, dtype=float)
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        iqr = q3 - q1
        lo = float(vals[vals >= q1 - 1.5 * iqr].min())
        hi = float(vals[vals <= q3 + 1.5 * iqr].max())
        cx = MARGIN + PLOT_W * (i / max(n - 1, 1)) if n > 1 else WIDTH / 2
        half = min(40.0, PLOT_W / (3.0 * n))
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(f'<line x1="{_fmt(cx)}" y1="{_fmt(sy(lo))}" x2="{_fmt(cx)}" '
                     f'y2="{_fmt(sy(hi))}" stroke="{color}"/>')
        parts.append(f'<rect x="{_fmt(cx - half)}" y="{_fmt(sy(q3))}" '
                     f'width="{_fmt(2 * half)}" '
                     f'height="{_fmt(abs(sy(q1) - sy(q3)))}" fill="{color}" '
                     f'opacity="0.35" stroke="{color}"/>')
        parts.append(f'<line x1="{_fmt(cx - half)}" y1="{_fmt(sy(med))}" '
                     f'x2="{_fmt(cx + half)}" y2="{_fmt(sy(med))}" '
                     f'stroke="{color}" stroke-width="2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
