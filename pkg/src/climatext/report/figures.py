"""Deterministic SVG figure builders (no plotting dependency).

Output is pure text with fixed fonts and sizes, so identical inputs give
byte-identical files, and tests can diff them.
"""

from __future__ import annotations

import numpy as np

FONT = "font-family=\"DejaVu Sans, sans-serif\""

PALETTE = ("#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
           "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac",
           "#2f4b7c", "#ffa600", "#665191", "#a05195", "#d45087")


def _svg(width: int, height: int, body: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">')
    caption = (f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
               f'font-size="14" {FONT}>{_esc(title)}</text>')
    return "\n".join([head, caption] + body + ["</svg>"]) + "\n"


def _esc(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _diverging_color(value: float) -> str:
    """[-1, 1] -> blue-white-red hex."""
    v = max(-1.0, min(1.0, value))
    if v >= 0:
        r, g, b = 255, round(255 * (1 - v * 0.75)), round(255 * (1 - v * 0.85))
    else:
        r, g, b = round(255 * (1 + v * 0.85)), round(255 * (1 + v * 0.75)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(labels: tuple[str, ...], matrix, title: str) -> str:
    """Annotated correlation heatmap; None cells render gray with a dash."""
    n = len(labels)
    cell = 72
    left, top = 120, 50
    width = left + n * cell + 30
    height = top + n * cell + 40
    body = []
    for i in range(n):
        for j in range(n):
            x, y = left + j * cell, top + i * cell
            value = matrix[i][j]
            color = "#d9d9d9" if value is None else _diverging_color(float(value))
            body.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                        f'fill="{color}" stroke="#ffffff" stroke-width="1"/>')
            text = "–" if value is None else f"{float(value):.2f}"
            body.append(f'<text x="{x + cell / 2:.1f}" y="{y + cell / 2 + 4:.1f}" '
                        f'text-anchor="middle" font-size="12" {FONT}>{text}</text>')
    for i, lab in enumerate(labels):
        body.append(f'<text x="{left - 8}" y="{top + i * cell + cell / 2 + 4:.1f}" '
                    f'text-anchor="end" font-size="11" {FONT}>{_esc(lab)}</text>')
        body.append(f'<text x="{left + i * cell + cell / 2:.1f}" '
                    f'y="{top + n * cell + 16}" text-anchor="middle" '
                    f'font-size="11" {FONT}>{_esc(lab)}</text>')
    return _svg(width, height, body, title)


def _axis(x0, y0, x1, y1, xticks, yticks, xlab, ylab) -> list[str]:
    body = [f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="#333333"/>',
            f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#333333"/>']
    for xv, xpix in xticks:
        body.append(f'<line x1="{xpix:.1f}" y1="{y1}" x2="{xpix:.1f}" '
                    f'y2="{y1 + 4}" stroke="#333333"/>')
        body.append(f'<text x="{xpix:.1f}" y="{y1 + 16}" text-anchor="middle" '
                    f'font-size="10" {FONT}>{xv}</text>')
    for yv, ypix in yticks:
        body.append(f'<line x1="{x0 - 4}" y1="{ypix:.1f}" x2="{x0}" '
                    f'y2="{ypix:.1f}" stroke="#333333"/>')
        body.append(f'<text x="{x0 - 6}" y="{ypix + 3:.1f}" text-anchor="end" '
                    f'font-size="10" {FONT}>{yv}</text>')
    body.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{y1 + 32}" text-anchor="middle" '
                f'font-size="11" {FONT}>{_esc(xlab)}</text>')
    body.append(f'<text x="14" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
                f'font-size="11" {FONT} transform="rotate(-90 14 '
                f'{(y0 + y1) / 2:.1f})">{_esc(ylab)}</text>')
    return body


def elbow_svg(inertias: dict[int, float], title: str) -> str:
    """Inertia-vs-k polyline with point markers."""
    ks = sorted(inertias)
    width, height = 640, 420
    x0, y0, x1, y1 = 70, 40, width - 30, height - 50
    kmin, kmax = min(ks), max(ks)
    vmax = max(inertias.values()) or 1.0

    def xpix(k):
        return x0 + (x1 - x0) * ((k - kmin) / (kmax - kmin) if kmax > kmin else 0.5)

    def ypix(v):
        return y1 - (y1 - y0) * (v / vmax)

    points = " ".join(f"{xpix(k):.2f},{ypix(inertias[k]):.2f}" for k in ks)
    body = _axis(x0, y0, x1, y1,
                 [(k, xpix(k)) for k in ks],
                 [(f"{vmax * f:.0f}", ypix(vmax * f)) for f in (0, 0.25, 0.5, 0.75, 1.0)],
                 "number of clusters k", "inertia")
    body.append(f'<polyline points="{points}" fill="none" stroke="{PALETTE[0]}" '
                f'stroke-width="2"/>')
    for k in ks:
        body.append(f'<circle cx="{xpix(k):.2f}" cy="{ypix(inertias[k]):.2f}" '
                    f'r="3.5" fill="{PALETTE[0]}"/>')
    return _svg(width, height, body, title)


def scatter_svg(points: np.ndarray, clusters, title: str,
                xlab: str = "PC1", ylab: str = "PC2") -> str:
    """2-D scatter colored by cluster id."""
    pts = np.asarray(points, dtype=float)
    width, height = 640, 480
    x0, y0, x1, y1 = 70, 40, width - 30, height - 50
    xmin, xmax = float(pts[:, 0].min()), float(pts[:, 0].max())
    ymin, ymax = float(pts[:, 1].min()), float(pts[:, 1].max())
    xpad = (xmax - xmin) * 0.05 or 1.0
    ypad = (ymax - ymin) * 0.05 or 1.0
    xmin, xmax, ymin, ymax = xmin - xpad, xmax + xpad, ymin - ypad, ymax + ypad

    def xpix(v):
        return x0 + (x1 - x0) * (v - xmin) / (xmax - xmin)

    def ypix(v):
        return y1 - (y1 - y0) * (v - ymin) / (ymax - ymin)

    body = _axis(x0, y0, x1, y1,
                 [(f"{xmin + (xmax - xmin) * f:.1f}", xpix(xmin + (xmax - xmin) * f))
                  for f in (0, 0.5, 1.0)],
                 [(f"{ymin + (ymax - ymin) * f:.1f}", ypix(ymin + (ymax - ymin) * f))
                  for f in (0, 0.5, 1.0)],
                 xlab, ylab)
    for (x, y), c in zip(pts, clusters):
        color = PALETTE[int(c) % len(PALETTE)]
        body.append(f'<circle cx="{xpix(x):.2f}" cy="{ypix(y):.2f}" r="3" '
                    f'fill="{color}" fill-opacity="0.75"/>')
    seen = sorted(set(int(c) for c in clusters))
    for i, c in enumerate(seen):
        lx, ly = x1 - 90, y0 + 14 * i + 8
        body.append(f'<rect x="{lx}" y="{ly - 8}" width="9" height="9" '
                    f'fill="{PALETTE[c % len(PALETTE)]}"/>')
        body.append(f'<text x="{lx + 13}" y="{ly}" font-size="10" {FONT}>'
                    f'cluster {c}</text>')
    return _svg(width, height, body, title)
