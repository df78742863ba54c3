"""Dependency-free SVG charts: embedding scatters and convergence/runtime lines."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]

WIDTH = 640
HEIGHT = 480
MARGIN = 56


def color_for(index: int) -> str:
    return PALETTE[index % len(PALETTE)]


def _finite_range(values):
    vals = [v for v in values if math.isfinite(v)]
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    if lo == hi:
        pad = abs(lo) * 0.05 or 0.5
        lo, hi = lo - pad, hi + pad
    return lo, hi


class _Axis:
    def __init__(self, lo, hi, pix_lo, pix_hi, log=False):
        self.log = log
        if log:
            lo = max(lo, 1e-12)
            hi = max(hi, lo * 10)
            self.lo, self.hi = math.log10(lo), math.log10(hi)
        else:
            self.lo, self.hi = lo, hi
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def __call__(self, v):
        if self.log:
            v = math.log10(max(v, 1e-12))
        span = self.hi - self.lo or 1.0
        frac = (v - self.lo) / span
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)

    def ticks(self, count=5):
        for t in range(count):
            v = self.lo + (self.hi - self.lo) * t / (count - 1)
            label = 10.0 ** v if self.log else v
            yield v if not self.log else label, label


def _tick_text(v):
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.4g}"


def _frame(title, xlabel, ylabel, body, legend_items):
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>\n'
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 8}" text-anchor="middle" font-size="11">{escape(xlabel)}</text>\n'
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" font-size="11" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>\n'
        f'<rect x="{MARGIN}" y="{MARGIN / 2}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 1.5 * MARGIN}" fill="none" stroke="#999"/>\n'
    ]
    parts.append(body)
    for idx, label in enumerate(legend_items):
        y = MARGIN / 2 + 16 + 14 * idx
        parts.append(
            f'<rect x="{WIDTH - MARGIN - 110}" y="{y - 8}" width="10" height="10" '
            f'fill="{color_for(idx)}"/>\n'
            f'<text x="{WIDTH - MARGIN - 96}" y="{y}" font-size="10">{escape(str(label))}</text>\n'
        )
    parts.append("</svg>\n")
    return "".join(parts)


def _axes(xs, ys, log_x, log_y):
    x_lo, x_hi = _finite_range(xs)
    y_lo, y_hi = _finite_range(ys)
    ax = _Axis(x_lo, x_hi, MARGIN, WIDTH - MARGIN, log=log_x)
    ay = _Axis(y_lo, y_hi, HEIGHT - MARGIN, MARGIN / 2, log=log_y)
    body = []
    for v, label in ax.ticks():
        px = ax(label if ax.log else v)
        body.append(
            f'<line x1="{px:.1f}" y1="{HEIGHT - MARGIN}" x2="{px:.1f}" '
            f'y2="{HEIGHT - MARGIN + 4}" stroke="#333"/>\n'
            f'<text x="{px:.1f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle" '
            f'font-size="9">{_tick_text(label)}</text>\n'
        )
    for v, label in ay.ticks():
        py = ay(label if ay.log else v)
        body.append(
            f'<line x1="{MARGIN - 4}" y1="{py:.1f}" x2="{MARGIN}" y2="{py:.1f}" stroke="#333"/>\n'
            f'<text x="{MARGIN - 6}" y="{py + 3:.1f}" text-anchor="end" '
            f'font-size="9">{_tick_text(label)}</text>\n'
        )
    return ax, ay, body


def scatter_svg(points, labels=None, title="embedding") -> str:
    """2-D scatter, points colored by categorical label."""
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    ax, ay, body = _axes(xs, ys, False, False)
    if labels is None:
        labels = [""] * len(xs)
    classes = sorted({str(l) for l in labels})
    class_idx = {c: k for k, c in enumerate(classes)}
    for x, y, lab in zip(xs, ys, labels):
        body.append(
            f'<circle cx="{ax(x):.2f}" cy="{ay(y):.2f}" r="2.5" '
            f'fill="{color_for(class_idx[str(lab)])}" fill-opacity="0.75"/>\n'
        )
    legend = classes if classes != [""] else []
    return _frame(title, "x0", "x1", "".join(body), legend)


def line_chart_svg(
    series,
    title="",
    xlabel="",
    ylabel="",
    log_x=False,
    log_y=False,
    color_key=None,
) -> str:
    """Polyline chart; series is a list of (label, xs, ys).

    One polyline is emitted per series.  color_key maps a series label to a
    color group (e.g. all seeds of one solver share a color); by default each
    series gets its own color.
    """
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    ax, ay, body = _axes(all_x, all_y, log_x, log_y)
    groups = []
    for label, xs, ys in series:
        group = color_key(label) if color_key else label
        if group not in groups:
            groups.append(group)
        color = color_for(groups.index(group))
        pts = " ".join(
            f"{ax(x):.2f},{ay(y):.2f}"
            for x, y in zip(xs, ys)
            if math.isfinite(x) and math.isfinite(y)
        )
        body.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.2" '
            f'stroke-opacity="0.8" points="{pts}"><title>{escape(str(label))}</title></polyline>\n'
        )
    return _frame(title, xlabel, ylabel, "".join(body), groups)


def write_svg(svg_text: str, path) -> None:
    Path(path).write_text(svg_text)
