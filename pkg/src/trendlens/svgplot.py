"""Minimal deterministic SVG charts for report artifacts.

Pure string assembly: no plotting library, no timestamps, no generated ids,
so identical inputs produce byte-identical files. Charts are intentionally
plain: axes, series, markers, reference lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

BLUE = "#1f77b4"
ORANGE = "#ff7f0e"
GREEN = "#2ca02c"
RED = "#d62728"
GRAY = "#7f7f7f"

_MARGIN_LEFT = 64
_MARGIN_RIGHT = 16
_MARGIN_TOP = 28
_MARGIN_BOTTOM = 34


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _fmt_tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1000 or abs(v) < 0.01:
        return f"{v:.2e}"
    return f"{v:.4g}"


@dataclass
class Panel:
    title: str = ""
    ylabel: str = ""
    curves: list = field(default_factory=list)   # (values, color, label)
    vlines: list = field(default_factory=list)   # (x, color)
    hlines: list = field(default_factory=list)   # (y, color)
    bands: list = field(default_factory=list)    # (x0, x1, color)
    points: list = field(default_factory=list)   # (x, y, color)
    xerr: list = field(default_factory=list)     # (x0, x1, y, color)


def _finite(values) -> list[float]:
    return [v for v in values if isinstance(v, (int, float)) and math.isfinite(v)]


def _panel_extent(panel: Panel):
    ys: list[float] = []
    xs: list[float] = [0.0]
    for values, _, _ in panel.curves:
        ys.extend(_finite(values))
        xs.append(len(values) - 1.0)
    for _, y, _ in panel.points:
        ys.append(y)
    for y, _ in panel.hlines:
        ys.append(y)
    for x0, x1, y, _ in panel.xerr:
        ys.append(y)
        xs.extend([x0, x1])
    for x, _ in panel.vlines:
        xs.append(x)
    if not ys:
        ys = [0.0, 1.0]
    y_lo, y_hi = min(ys), max(ys)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.06 * (y_hi - y_lo)
    return max(xs), y_lo - pad, y_hi + pad


def _polyline_segments(values):
    segment = []
    for i, v in enumerate(values):
        if v is None or not math.isfinite(v):
            if len(segment) > 1:
                yield segment
            segment = []
        else:
            segment.append((i, v))
    if len(segment) > 1:
        yield segment


def render_panels(panels: list[Panel], x_ticks: list[tuple[float, str]],
                  width: int = 920, panel_height: int = 230) -> str:
    """Stacked panels sharing the x axis; x_ticks are (position, label)."""
    height = panel_height * len(panels)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    for p_idx, panel in enumerate(panels):
        top = p_idx * panel_height + _MARGIN_TOP
        left = _MARGIN_LEFT
        plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
        plot_h = panel_height - _MARGIN_TOP - _MARGIN_BOTTOM
        x_max, y_lo, y_hi = _panel_extent(panel)
        x_max = max(x_max, 1.0)

        def sx(x):
            return left + plot_w * (x / x_max)

        def sy(y):
            return top + plot_h * (1.0 - (y - y_lo) / (y_hi - y_lo))

        parts.append(f'<rect x="{left}" y="{top}" width="{plot_w}" '
                     f'height="{plot_h}" fill="none" stroke="#333333"/>')
        if panel.title:
            parts.append(f'<text x="{left}" y="{top - 10}" '
                         f'font-size="13">{panel.title}</text>')
        if panel.ylabel:
            cy = top + plot_h / 2
            parts.append(f'<text x="14" y="{_fmt(cy)}" font-size="11" '
                         f'transform="rotate(-90 14 {_fmt(cy)})" '
                         f'text-anchor="middle">{panel.ylabel}</text>')
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            yv = y_lo + frac * (y_hi - y_lo)
            yy = sy(yv)
            parts.append(f'<line x1="{left - 4}" y1="{_fmt(yy)}" x2="{left}" '
                         f'y2="{_fmt(yy)}" stroke="#333333"/>')
            parts.append(f'<text x="{left - 8}" y="{_fmt(yy + 3)}" '
                         f'text-anchor="end">{_fmt_tick(yv)}</text>')
        for xv, label in x_ticks:
            xx = sx(xv)
            parts.append(f'<line x1="{_fmt(xx)}" y1="{top + plot_h}" '
                         f'x2="{_fmt(xx)}" y2="{top + plot_h + 4}" '
                         f'stroke="#333333"/>')
            if p_idx == len(panels) - 1:
                parts.append(f'<text x="{_fmt(xx)}" y="{top + plot_h + 16}" '
                             f'text-anchor="middle">{label}</text>')
        for x0, x1, color in panel.bands:
            parts.append(f'<rect x="{_fmt(sx(x0))}" y="{top}" '
                         f'width="{_fmt(max(sx(x1) - sx(x0), 0.5))}" '
                         f'height="{plot_h}" fill="{color}" opacity="0.25"/>')
        for y, color in panel.hlines:
            parts.append(f'<line x1="{left}" y1="{_fmt(sy(y))}" '
                         f'x2="{left + plot_w}" y2="{_fmt(sy(y))}" '
                         f'stroke="{color}" stroke-dasharray="5,3"/>')
        for x, color in panel.vlines:
            parts.append(f'<line x1="{_fmt(sx(x))}" y1="{top}" '
                         f'x2="{_fmt(sx(x))}" y2="{top + plot_h}" '
                         f'stroke="{color}" stroke-dasharray="5,3"/>')
        legend_x = left + 8
        for values, color, label in panel.curves:
            for segment in _polyline_segments(values):
                pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in segment)
                parts.append(f'<polyline points="{pts}" fill="none" '
                             f'stroke="{color}" stroke-width="1.5"/>')
            if label:
                parts.append(f'<line x1="{legend_x}" y1="{top + 10}" '
                             f'x2="{legend_x + 18}" y2="{top + 10}" '
                             f'stroke="{color}" stroke-width="1.5"/>')
                parts.append(f'<text x="{legend_x + 22}" y="{top + 13}">'
                             f'{label}</text>')
                legend_x += 30 + 7 * len(label)
        for x0, x1, y, color in panel.xerr:
            yy = _fmt(sy(y))
            parts.append(f'<line x1="{_fmt(sx(x0))}" y1="{yy}" '
                         f'x2="{_fmt(sx(x1))}" y2="{yy}" stroke="{color}" '
                         f'stroke-width="2"/>')
            for xe in (x0, x1):
                parts.append(f'<line x1="{_fmt(sx(xe))}" y1="{_fmt(sy(y) - 4)}" '
                             f'x2="{_fmt(sx(xe))}" y2="{_fmt(sy(y) + 4)}" '
                             f'stroke="{color}" stroke-width="2"/>')
        for x, y, color in panel.points:
            parts.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" '
                         f'r="3.5" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_histogram(title: str, bin_edges, groups,
                     width: int = 640, height: int = 360) -> str:
    """Grouped bar histogram; groups is a list of (label, counts, color)."""
    n_bins = len(bin_edges) - 1
    left = _MARGIN_LEFT
    top = _MARGIN_TOP
    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM
    max_count = max((max(counts) if len(counts) else 0)
                    for _, counts, _ in groups)
    max_count = max(max_count, 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333"/>',
        f'<text x="{left}" y="{top - 10}" font-size="13">{title}</text>',
    ]
    bin_w = plot_w / n_bins
    bar_w = bin_w / max(len(groups), 1)
    for g_idx, (label, counts, color) in enumerate(groups):
        for b in range(n_bins):
            c = counts[b] if b < len(counts) else 0
            if c <= 0:
                continue
            bh = plot_h * (c / max_count)
            x = left + b * bin_w + g_idx * bar_w
            y = top + plot_h - bh
            parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" '
                         f'width="{_fmt(bar_w * 0.92)}" height="{_fmt(bh)}" '
                         f'fill="{color}" opacity="0.8"/>')
        lx = left + 8 + g_idx * 150
        parts.append(f'<rect x="{lx}" y="{top + 6}" width="12" height="12" '
                     f'fill="{color}" opacity="0.8"/>')
        parts.append(f'<text x="{lx + 16}" y="{top + 16}">{label}</text>')
    for frac in (0.0, 0.5, 1.0):
        cv = frac * max_count
        yy = top + plot_h * (1.0 - frac)
        parts.append(f'<line x1="{left - 4}" y1="{_fmt(yy)}" x2="{left}" '
                     f'y2="{_fmt(yy)}" stroke="#333333"/>')
        parts.append(f'<text x="{left - 8}" y="{_fmt(yy + 3)}" '
                     f'text-anchor="end">{_fmt_tick(cv)}</text>')
    step = max(1, n_bins // 8)
    for b in range(0, n_bins + 1, step):
        xx = left + b * bin_w
        parts.append(f'<line x1="{_fmt(xx)}" y1="{top + plot_h}" '
                     f'x2="{_fmt(xx)}" y2="{top + plot_h + 4}" '
                     f'stroke="#333333"/>')
        parts.append(f'<text x="{_fmt(xx)}" y="{top + plot_h + 16}" '
                     f'text-anchor="middle">{_fmt_tick(bin_edges[b])}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
