"""Tiny dependency-free SVG scatter for binned correlations.

Writes a fixed-size plot: the reference curve as a polyline and the binned
means as circles. Good enough to eyeball a run; anything fancier belongs in
a real plotting package.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

WIDTH, HEIGHT = 640, 420
MARGIN = 48


def _x(angle: float, lo: float, hi: float) -> float:
    return MARGIN + (angle - lo) / (hi - lo) * (WIDTH - 2 * MARGIN)


def _y(value: float) -> float:
    # correlation axis fixed to [-1.1, 1.1]
    return MARGIN + (1.1 - value) / 2.2 * (HEIGHT - 2 * MARGIN)


def render_correlation_svg(
    bins: Sequence,
    reference: Callable[[float], float],
    title: str,
    angle_range: tuple = (0.0, 360.0),
) -> str:
    lo, hi = angle_range
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">'
        % (WIDTH, HEIGHT),
        '<rect width="100%" height="100%" fill="white"/>',
        '<text x="%d" y="24" font-family="monospace" font-size="14">%s</text>'
        % (MARGIN, title),
    ]
    # axes
    ax = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN)
    parts.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>' % ax)
    parts.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>'
                 % (MARGIN, MARGIN, MARGIN, HEIGHT - MARGIN))
    for v in (-1.0, 0.0, 1.0):
        y = _y(v)
        parts.append(
            '<line x1="%d" y1="%.1f" x2="%d" y2="%.1f" stroke="#cccccc"/>'
            % (MARGIN, y, WIDTH - MARGIN, y))
        parts.append(
            '<text x="6" y="%.1f" font-family="monospace" font-size="11">'
            '%+.0f</text>' % (y + 4, v))
    step = (hi - lo) / 4.0
    for i in range(5):
        a = lo + i * step
        parts.append(
            '<text x="%.1f" y="%d" font-family="monospace" font-size="11">'
            '%.0f</text>' % (_x(a, lo, hi) - 10, HEIGHT - MARGIN + 16, a))

    # reference curve
    pts = []
    n = 240
    for i in range(n + 1):
        a = lo + (hi - lo) * i / n
        pts.append("%.2f,%.2f" % (_x(a, lo, hi), _y(reference(a))))
    parts.append('<polyline points="%s" fill="none" stroke="#1f77b4"/>'
                 % " ".join(pts))

    # binned means: connected line plus markers
    if bins:
        mean_pts = " ".join(
            "%.2f,%.2f" % (_x(b.angle_deg, lo, hi), _y(b.mean_corr))
            for b in bins)
        parts.append('<polyline points="%s" fill="none" stroke="#d62728"/>'
                     % mean_pts)
    for b in bins:
        parts.append(
            '<circle cx="%.2f" cy="%.2f" r="3" fill="#d62728"/>'
            % (_x(b.angle_deg, lo, hi), _y(b.mean_corr)))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_run_svg(path, summary, reference_deg: Callable[[float], float]) -> None:
    title = "%s run, %d trials, seed %d" % (
        summary.mode, summary.trials, summary.seed)
    svg = render_correlation_svg(summary.bins, reference_deg, title)
    with open(path, "w") as fh:
        fh.write(svg)


def epr_reference(angle_deg: float) -> float:
    return -math.cos(math.radians(angle_deg))


def ghz_reference(angle_deg: float) -> float:
    return -math.cos(math.radians(angle_deg))
