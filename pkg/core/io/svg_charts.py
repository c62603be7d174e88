"""Static SVG charts written with plain string templates.

Bars carry `class="bar"`, significance bounds `class="bound"` and series
polylines `class="line"` so tests can check structure without rendering.
"""
from __future__ import annotations

import os
from html import escape

import numpy as np

from core.logkit import get_logger

log = get_logger(__name__)

WIDTH, HEIGHT = 720, 320
PAD_L, PAD_R, PAD_T, PAD_B = 56, 16, 36, 40
FONT = "font-family:Inter,system-ui,-apple-system,Segoe UI,Roboto,Arial,sans-serif"
PALETTE = ("#111", "#c0392b", "#2471a3", "#7d3c98", "#1e8449")


class _Frame:
    """Maps data coordinates to the plot area."""

    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        if x_hi <= x_lo:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_hi <= y_lo:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
        self.x_lo, self.x_hi, self.y_lo, self.y_hi = x_lo, x_hi, y_lo, y_hi

    def x(self, v: float) -> float:
        return PAD_L + (v - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - PAD_L - PAD_R)

    def y(self, v: float) -> float:
        return HEIGHT - PAD_B - (v - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - PAD_T - PAD_B)


def _document(title: str, body: list[str], frame: _Frame, x_label: str) -> str:
    axis_y = frame.y(0.0) if frame.y_lo <= 0.0 <= frame.y_hi else HEIGHT - PAD_B
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" style="{FONT}">',
        f'  <rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#fff"/>',
        f'  <text x="{PAD_L}" y="22" font-size="15" font-weight="700" fill="#111">{escape(title)}</text>',
        f'  <line class="axis" x1="{PAD_L}" y1="{axis_y:.2f}" x2="{WIDTH - PAD_R}" y2="{axis_y:.2f}" stroke="#999" stroke-width="1"/>',
        f'  <line class="axis" x1="{PAD_L}" y1="{PAD_T}" x2="{PAD_L}" y2="{HEIGHT - PAD_B}" stroke="#999" stroke-width="1"/>',
        f'  <text x="{PAD_L - 6}" y="{frame.y(frame.y_hi) + 4:.2f}" font-size="11" text-anchor="end" fill="#444">{frame.y_hi:.3g}</text>',
        f'  <text x="{PAD_L - 6}" y="{frame.y(frame.y_lo) + 4:.2f}" font-size="11" text-anchor="end" fill="#444">{frame.y_lo:.3g}</text>',
        f'  <text x="{PAD_L}" y="{HEIGHT - 12}" font-size="11" fill="#444">{frame.x_lo:g}</text>',
        f'  <text x="{WIDTH - PAD_R}" y="{HEIGHT - 12}" font-size="11" text-anchor="end" fill="#444">{frame.x_hi:g}</text>',
        f'  <text x="{(PAD_L + WIDTH - PAD_R) / 2:.0f}" y="{HEIGHT - 12}" font-size="12" text-anchor="middle" fill="#444">{escape(x_label)}</text>',
    ]
    return "\n".join(parts + body + ["</svg>", ""])


def bar_chart(positions, heights, title: str, bound: float | None = None, x_label: str = "lag") -> str:
    """Correlogram: one bar per position, optional +/-bound lines."""
    pos = np.asarray(positions, dtype=float)
    val = np.nan_to_num(np.asarray(heights, dtype=float))
    top = max(1.0, float(np.max(np.abs(val))) if val.size else 1.0)
    frame = _Frame(float(pos.min()) - 0.5, float(pos.max()) + 0.5, -top, top)
    slot = (frame.x(1.0) - frame.x(0.0)) * 0.7
    body = []
    for p, v in zip(pos, val):
        y0, y1 = sorted((frame.y(0.0), frame.y(v)))
        body.append(
            f'  <rect class="bar" x="{frame.x(p) - slot / 2:.2f}" y="{y0:.2f}" width="{slot:.2f}" '
            f'height="{max(y1 - y0, 0.5):.2f}" fill="#111"><title>{p:g}: {v:.4f}</title></rect>'
        )
    if bound is not None:
        for level in (bound, -bound):
            body.append(
                f'  <line class="bound" x1="{PAD_L}" y1="{frame.y(level):.2f}" x2="{WIDTH - PAD_R}" '
                f'y2="{frame.y(level):.2f}" stroke="#2471a3" stroke-dasharray="5,4" stroke-width="1.2"/>'
            )
    return _document(title, body, frame, x_label)


def line_chart(times, series: dict[str, np.ndarray], title: str, markers=(), x_label: str = "year") -> str:
    """One polyline per named series; missing values break the line. `markers` draws vertical rules."""
    t = np.asarray(times, dtype=float)
    stacked = np.concatenate([np.asarray(v, dtype=float) for v in series.values()]) if series else np.zeros(1)
    finite = stacked[np.isfinite(stacked)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (-1.0, 1.0)
    margin = 0.05 * (hi - lo) if hi > lo else 1.0
    frame = _Frame(float(t.min()), float(t.max()), lo - margin, hi + margin)
    body = []
    for k, (name, values) in enumerate(series.items()):
        colour = PALETTE[k % len(PALETTE)]
        v = np.asarray(values, dtype=float)
        runs, current = [], []
        for ti, vi in zip(t, v):
            if np.isfinite(vi):
                current.append(f"{frame.x(ti):.2f},{frame.y(vi):.2f}")
            elif current:
                runs.append(current)
                current = []
        if current:
            runs.append(current)
        for run in runs:
            body.append(
                f'  <polyline class="line" data-series="{escape(name)}" fill="none" stroke="{colour}" '
                f'stroke-width="1.4" points="{" ".join(run)}"/>'
            )
        body.append(
            f'  <text x="{WIDTH - PAD_R}" y="{22 + 14 * k}" font-size="11" text-anchor="end" fill="{colour}">{escape(name)}</text>'
        )
    for m in markers:
        x = frame.x(float(m))
        body.append(
            f'  <line class="marker" x1="{x:.2f}" y1="{PAD_T}" x2="{x:.2f}" y2="{HEIGHT - PAD_B}" '
            f'stroke="#c0392b" stroke-dasharray="3,3" stroke-width="1"/>'
        )
    return _document(title, body, frame, x_label)


def write_svg(path: str, svg: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(svg)
    log.ok("Wrote %s", path)
    return path
