"""Small self-contained SVG line plots. No plotting library involved."""

from __future__ import annotations

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

_WIDTH = 960
_HEIGHT = 420
_MARGIN_LEFT = 72
_MARGIN_RIGHT = 24
_MARGIN_TOP = 44
_MARGIN_BOTTOM = 56


def _px(value: float) -> str:
    return f"{value:.2f}"


def _tick_label(value: float) -> str:
    return f"{value:.4g}"


def decimate_minmax(values: np.ndarray, max_bins: int = 1500) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a long series to per-bin minima and maxima for display.

    Returns (x indices, y values) tracing min and max of each bin so peaks
    survive decimation. Short inputs pass through unchanged.
    """
    n = values.size
    if n <= 2 * max_bins:
        return np.arange(n, dtype=np.float64), np.asarray(values, dtype=np.float64)
    edges = np.linspace(0, n, max_bins + 1).astype(int)
    xs = []
    ys = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        chunk = values[lo:hi]
        i_min = lo + int(np.argmin(chunk))
        i_max = lo + int(np.argmax(chunk))
        for idx in sorted((i_min, i_max)):
            xs.append(float(idx))
            ys.append(float(values[idx]))
    return np.array(xs), np.array(ys)


def svg_line_plot(
    curves,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    v_marks=(),
    band=None,
) -> str:
    """Render curves as an SVG document string.

    Args:
        curves: sequence of (xs, ys, label) tuples; NaN y values split lines.
        title: text above the plot.
        x_label: text below the x axis.
        y_label: text along the y axis.
        v_marks: x positions drawn as dashed vertical lines.
        band: optional (xs, lower, upper) shaded region drawn behind curves.
    """
    xs_all = []
    ys_all = []
    for xs, ys, _ in curves:
        xs_all.append(np.asarray(xs, dtype=np.float64))
        ys_all.append(np.asarray(ys, dtype=np.float64))
    if band is not None:
        xs_all.append(np.asarray(band[0], dtype=np.float64))
        ys_all.append(np.asarray(band[1], dtype=np.float64))
        ys_all.append(np.asarray(band[2], dtype=np.float64))
    if v_marks:
        xs_all.append(np.asarray(list(v_marks), dtype=np.float64))

    x_cat = np.concatenate([a[np.isfinite(a)] for a in xs_all]) if xs_all else np.zeros(1)
    y_cat = np.concatenate([a[np.isfinite(a)] for a in ys_all]) if ys_all else np.zeros(1)
    x_lo, x_hi = _padded_range(x_cat, pad=0.0)
    y_lo, y_hi = _padded_range(y_cat, pad=0.05)

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def to_x(v):
        return _MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w

    def to_y(v):
        return _MARGIN_TOP + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
    ]

    # Grid and tick labels.
    for value in np.linspace(x_lo, x_hi, 6):
        px = to_x(value)
        parts.append(
            f'<line x1="{_px(px)}" y1="{_MARGIN_TOP}" x2="{_px(px)}" '
            f'y2="{_MARGIN_TOP + plot_h}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_px(px)}" y="{_MARGIN_TOP + plot_h + 18}" font-size="12" '
            f'text-anchor="middle" fill="#333333">{_tick_label(value)}</text>'
        )
    for value in np.linspace(y_lo, y_hi, 6):
        py = to_y(value)
        parts.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{_px(py)}" x2="{_MARGIN_LEFT + plot_w}" '
            f'y2="{_px(py)}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{_px(py + 4)}" font-size="12" '
            f'text-anchor="end" fill="#333333">{_tick_label(value)}</text>'
        )

    if band is not None:
        bx, lower, upper = (np.asarray(a, dtype=np.float64) for a in band)
        points = [f"{_px(to_x(x))},{_px(to_y(y))}" for x, y in zip(bx, upper)]
        points += [f"{_px(to_x(x))},{_px(to_y(y))}" for x, y in zip(bx[::-1], lower[::-1])]
        parts.append(
            f'<polygon points="{" ".join(points)}" fill="{PALETTE[0]}" '
            f'fill-opacity="0.20" stroke="none"/>'
        )

    for mark in v_marks:
        px = to_x(float(mark))
        parts.append(
            f'<line x1="{_px(px)}" y1="{_MARGIN_TOP}" x2="{_px(px)}" '
            f'y2="{_MARGIN_TOP + plot_h}" stroke="#555555" stroke-width="1" '
            f'stroke-dasharray="4,3"/>'
        )

    for i, (xs, ys, label) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        for seg_xs, seg_ys in _finite_runs(xs, ys):
            points = " ".join(
                f"{_px(to_x(x))},{_px(to_y(y))}" for x, y in zip(seg_xs, seg_ys)
            )
            parts.append(
                f'<polyline points="{points}" fill="none" stroke="{color}" '
                f'stroke-width="1.4"/>'
            )
        if label:
            ly = _MARGIN_TOP + 16 + 16 * i
            lx = _MARGIN_LEFT + plot_w - 160
            parts.append(
                f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            parts.append(
                f'<text x="{lx + 28}" y="{ly}" font-size="12" fill="#333333">{label}</text>'
            )

    parts.append(
        f'<rect x="{_MARGIN_LEFT}" y="{_MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    if title:
        parts.append(
            f'<text x="{_WIDTH // 2}" y="24" font-size="15" text-anchor="middle" '
            f'fill="#111111">{title}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{_MARGIN_LEFT + plot_w / 2:.0f}" y="{_HEIGHT - 14}" '
            f'font-size="13" text-anchor="middle" fill="#111111">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="18" y="{_MARGIN_TOP + plot_h / 2:.0f}" font-size="13" '
            f'text-anchor="middle" fill="#111111" '
            f'transform="rotate(-90 18 {_MARGIN_TOP + plot_h / 2:.0f})">{y_label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _padded_range(values: np.ndarray, pad: float) -> tuple[float, float]:
    if values.size == 0:
        return 0.0, 1.0
    lo = float(values.min())
    hi = float(values.max())
    if lo == hi:
        lo -= 0.5
        hi += 0.5
    extent = hi - lo
    return lo - pad * extent, hi + pad * extent


def _finite_runs(xs: np.ndarray, ys: np.ndarray):
    """Yield (xs, ys) chunks between NaN gaps."""
    finite = np.isfinite(ys) & np.isfinite(xs)
    if finite.all():
        yield xs, ys
        return
    idx = np.flatnonzero(finite)
    if idx.size == 0:
        return
    splits = np.flatnonzero(np.diff(idx) > 1)
    for chunk in np.split(idx, splits + 1):
        if chunk.size >= 2:
            yield xs[chunk], ys[chunk]
