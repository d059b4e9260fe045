"""Minimal SVG line chart of score against selected band count."""

from pathlib import Path
from typing import List, Mapping, Optional, Union

from ..config.constants import SVG_COLORS, SVG_HEIGHT, SVG_MARGIN_FRACTION, SVG_WIDTH
from ..core.exceptions import ReportError
from ..evaluation.bands_curve import BandsCurve


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
        .replace("'", "&#39;")
    )


def _format_tick(value: float) -> str:
    if abs(value) >= 100:
        return f"{value:.0f}"
    if abs(value) >= 10:
        return f"{value:.1f}"
    return f"{value:.2f}"


def render_bands_chart(
    curves: Mapping[str, BandsCurve],
    aucs: Optional[Mapping[str, float]] = None,
    title: str = "Score vs. selected bands",
    x_label: str = "selected bands (k)",
    y_label: str = "overall accuracy",
) -> str:
    """
    Render one polyline per method on a fixed canvas.

    Args:
        curves: Curve per method name, drawn in sorted name order
        aucs: Bands AUC per method, shown in the legend when present
        title: Chart title
        x_label: Horizontal axis label
        y_label: Vertical axis label

    Returns:
        Self-contained SVG document
    """
    if not curves:
        raise ReportError("no curves to plot")
    aucs = aucs or {}
    width, height = SVG_WIDTH, SVG_HEIGHT
    plot_left = width * SVG_MARGIN_FRACTION
    plot_right = width * (1.0 - SVG_MARGIN_FRACTION)
    plot_top = height * SVG_MARGIN_FRACTION
    plot_bottom = height * (1.0 - SVG_MARGIN_FRACTION)
    plot_width = plot_right - plot_left
    plot_height = plot_bottom - plot_top

    ks = [k for curve in curves.values() for k in curve.ks]
    scores = [s for curve in curves.values() for s in curve.scores]
    x_min, x_max = float(min(ks)), float(max(ks))
    if x_max <= x_min:
        x_min -= 1.0
        x_max += 1.0
    y_min, y_max = min(0.0, min(scores)), max(1.0, max(scores))

    def x_to_px(x: float) -> float:
        return plot_left + ((x - x_min) / (x_max - x_min)) * plot_width

    def y_to_px(y: float) -> float:
        return plot_bottom - ((y - y_min) / (y_max - y_min)) * plot_height

    lines: List[str] = []
    lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    lines.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">')
    lines.append('<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>')
    lines.append(
        f'<text x="{width / 2:.1f}" y="{plot_top / 2 + 6:.1f}" text-anchor="middle" font-size="18" font-family="Arial">{_escape(title)}</text>'
    )

    # Grid and y ticks.
    y_tick_count = 5
    for i in range(y_tick_count + 1):
        value = y_min + (y_max - y_min) * i / y_tick_count
        y = y_to_px(value)
        lines.append(f'<line x1="{plot_left:.2f}" y1="{y:.2f}" x2="{plot_right:.2f}" y2="{y:.2f}" stroke="#d9d9d9" stroke-width="1"/>')
        lines.append(
            f'<text x="{plot_left - 8:.2f}" y="{y + 4:.2f}" text-anchor="end" font-size="12" font-family="Arial">{_format_tick(value)}</text>'
        )

    # Axes.
    lines.append(f'<line x1="{plot_left:.2f}" y1="{plot_bottom:.2f}" x2="{plot_right:.2f}" y2="{plot_bottom:.2f}" stroke="#000000" stroke-width="2"/>')
    lines.append(f'<line x1="{plot_left:.2f}" y1="{plot_top:.2f}" x2="{plot_left:.2f}" y2="{plot_bottom:.2f}" stroke="#000000" stroke-width="2"/>')

    for k in sorted(set(ks)):
        x = x_to_px(k)
        lines.append(f'<line x1="{x:.2f}" y1="{plot_bottom:.2f}" x2="{x:.2f}" y2="{plot_bottom + 5:.2f}" stroke="#000000" stroke-width="1"/>')
        lines.append(
            f'<text x="{x:.2f}" y="{plot_bottom + 20:.2f}" text-anchor="middle" font-size="12" font-family="Arial">{k}</text>'
        )

    legend_x = plot_right - 190
    legend_y = plot_top + 18
    for idx, method in enumerate(sorted(curves)):
        curve = curves[method]
        color = SVG_COLORS[idx % len(SVG_COLORS)]
        poly_points = " ".join(f"{x_to_px(k):.2f},{y_to_px(s):.2f}" for k, s in zip(curve.ks, curve.scores))
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{poly_points}"/>')
        for k, s in zip(curve.ks, curve.scores):
            lines.append(f'<circle cx="{x_to_px(k):.2f}" cy="{y_to_px(s):.2f}" r="3" fill="{color}"/>')

        label = method if method not in aucs else f"{method} (AUC {aucs[method]:.4f})"
        ly = legend_y + idx * 20
        lines.append(f'<line x1="{legend_x:.2f}" y1="{ly:.2f}" x2="{legend_x + 22:.2f}" y2="{ly:.2f}" stroke="{color}" stroke-width="3"/>')
        lines.append(
            f'<text x="{legend_x + 28:.2f}" y="{ly + 4:.2f}" text-anchor="start" font-size="12" font-family="Arial">{_escape(label)}</text>'
        )

    # Axis labels.
    lines.append(
        f'<text x="{(plot_left + plot_right) / 2:.1f}" y="{height - 12:.1f}" text-anchor="middle" font-size="14" font-family="Arial">{_escape(x_label)}</text>'
    )
    y_mid = (plot_top + plot_bottom) / 2
    lines.append(
        f'<text x="20" y="{y_mid:.1f}" text-anchor="middle" font-size="14" font-family="Arial" transform="rotate(-90 20 {y_mid:.1f})">{_escape(y_label)}</text>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_bands_chart(path: Union[str, Path], curves: Mapping[str, BandsCurve],
                      aucs: Optional[Mapping[str, float]] = None, **labels) -> Path:
    document = render_bands_chart(curves, aucs, **labels)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document, encoding="utf-8")
    return path
