"""Standalone SVG line plot of loss curves with stderr whiskers."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

from .experiment import read_curve_csv

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 30, 60
COLORS = ["#1f4fd8", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9)
    ticks = []
    i = first
    while i * step <= hi + 1e-9 * step:
        ticks.append(round(i * step, 12))
        i += 1
    return ticks


def render_svg(series: Sequence[tuple[str, list[dict]]]) -> str:
    pts = [r for _, rows in series for r in rows]
    x_lo = min((r["d"] for r in pts), default=0.0)
    x_hi = max((r["d"] for r in pts), default=1.0)
    y_hi = max((r["l_hat"] + r["stderr"] for r in pts), default=1.0)
    if x_hi <= x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = 0.0, max(y_hi * 1.05, 1e-3)
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        if x_lo - 1e-12 <= t <= x_hi + 1e-12:
            x = sx(t)
            out.append(f'<line class="tick" x1="{x:.2f}" y1="{MARGIN_T + plot_h}" x2="{x:.2f}" y2="{MARGIN_T + plot_h + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{MARGIN_T + plot_h + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        if t <= y_hi + 1e-12:
            y = sy(t)
            out.append(f'<line class="tick" x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L}" y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">d</text>')
    out.append(
        f'<text x="18" y="{MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + plot_h / 2:.1f})">scaled loss l(d)</text>'
    )

    for i, (label, rows) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{sx(r['d']):.2f},{sy(r['l_hat']):.2f}" for r in rows)
        out.append(f'<g class="series" stroke="{color}" fill="{color}">')
        out.append(f'<polyline class="curve" points="{coords}" fill="none" stroke-width="1.5"/>')
        for r in rows:
            x = sx(r["d"])
            y0, y1 = sy(r["l_hat"] - r["stderr"]), sy(r["l_hat"] + r["stderr"])
            out.append(f'<line class="whisker" x1="{x:.2f}" y1="{y0:.2f}" x2="{x:.2f}" y2="{y1:.2f}"/>')
            out.append(f'<circle class="marker" cx="{x:.2f}" cy="{sy(r["l_hat"]):.2f}" r="2.5"/>')
        out.append("</g>")
        ly = MARGIN_T + 15 + 20 * i
        lx = WIDTH - MARGIN_R + 15
        out.append(
            f'<g class="legend-entry"><line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>'
            f'<text x="{lx + 32}" y="{ly + 4}">{escape(label)}</text></g>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(curve_csvs, out_path) -> None:
    """Plot one series per sweep CSV, labelled by its horizon N."""
    if isinstance(curve_csvs, (str, bytes)) or hasattr(curve_csvs, "__fspath__"):
        curve_csvs = [curve_csvs]
    series = []
    for path in curve_csvs:
        rows = read_curve_csv(path)
        label = f"N={rows[0]['N']}" if rows else f"{path} (empty)"
        series.append((label, rows))
    svg = render_svg(series)
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(svg)
    except OSError as exc:
        raise OSError(f"cannot write SVG to {out_path}: {exc.strerror or exc}") from exc
