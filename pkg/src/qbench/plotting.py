"""Minimal deterministic SVG scatter plots of sweep results.

The SVG is assembled from plain strings with fixed-precision
coordinates, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

from typing import Mapping, Sequence

WIDTH = 640.0
HEIGHT = 480.0
MARGIN_LEFT = 70.0
MARGIN_RIGHT = 20.0
MARGIN_TOP = 20.0
MARGIN_BOTTOM = 50.0
N_TICKS = 5

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


def _domain(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        return 0.0, 1.0
    lo, hi = min(values), max(values)
    if lo == hi:
        pad = 0.5 if lo == 0.0 else abs(lo) * 0.05
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def render_scatter(
    series: Mapping[int, Sequence[tuple[float, float]]],
    x_label: str,
    y_label: str,
) -> str:
    """SVG text for per-series scatter points with linear axes.

    ``series`` maps a state id to its (x, y) points; series are drawn in
    sorted id order with a fixed palette, so output bytes depend only on
    the data.
    """
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    x_lo, x_hi = _domain(xs)
    y_lo, y_hi = _domain(ys)
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x: float) -> float:
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:g}" height="{HEIGHT:g}" '
        f'viewBox="0 0 {WIDTH:g} {HEIGHT:g}">',
        f'<rect x="0" y="0" width="{WIDTH:g}" height="{HEIGHT:g}" fill="white"/>',
        f'<rect x="{MARGIN_LEFT:.2f}" y="{MARGIN_TOP:.2f}" width="{plot_w:.2f}" '
        f'height="{plot_h:.2f}" fill="none" stroke="black" stroke-width="1"/>',
    ]

    for i in range(N_TICKS):
        frac = i / (N_TICKS - 1)
        x_val = x_lo + frac * (x_hi - x_lo)
        y_val = y_lo + frac * (y_hi - y_lo)
        x_pix = sx(x_val)
        y_pix = sy(y_val)
        parts.append(
            f'<line x1="{x_pix:.2f}" y1="{MARGIN_TOP + plot_h:.2f}" '
            f'x2="{x_pix:.2f}" y2="{MARGIN_TOP + plot_h + 5:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x_pix:.2f}" y="{MARGIN_TOP + plot_h + 18:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{x_val:.4g}</text>'
        )
        parts.append(
            f'<line x1="{MARGIN_LEFT - 5:.2f}" y1="{y_pix:.2f}" '
            f'x2="{MARGIN_LEFT:.2f}" y2="{y_pix:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 8:.2f}" y="{y_pix + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{y_val:.4g}</text>'
        )

    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.2f}" y="{HEIGHT - 10:.2f}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.2f}" font-family="sans-serif" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.2f})">{y_label}</text>'
    )

    for rank, state_id in enumerate(sorted(series)):
        color = PALETTE[rank % len(PALETTE)]
        for x, y in series[state_id]:
            parts.append(
                f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}" fill-opacity="0.8"/>'
            )
        legend_y = MARGIN_TOP + 14 + 16 * rank
        parts.append(
            f'<circle cx="{MARGIN_LEFT + plot_w - 70:.2f}" cy="{legend_y - 4:.2f}" r="4" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT + plot_w - 60:.2f}" y="{legend_y:.2f}" font-family="sans-serif" '
            f'font-size="11">state {state_id}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
