"""Dependency-free SVG rendering of impact and forecast charts.

Output is a pure function of the input data (fixed-precision
coordinates, no timestamps) so files can be compared byte for byte.
"""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .forecast import ForecastBand
from .impact import ImpactReport
from .series import MeanSeries, ValidationError

WIDTH = 720
PANEL_HEIGHT = 180
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 20, 28, 28
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.4g}"


class _Axes:
    def __init__(self, top: float, height: float, x_range, y_values, include_zero=False):
        self.left = MARGIN_LEFT
        self.right = WIDTH - MARGIN_RIGHT
        self.top = top
        self.bottom = top + height
        self.x0, self.x1 = x_range
        ys = np.concatenate([np.ravel(v) for v in y_values])
        lo, hi = float(ys.min()), float(ys.max())
        if include_zero:
            lo, hi = min(lo, 0.0), max(hi, 0.0)
        if hi - lo < 1e-12:
            pad = max(abs(hi) * 0.1, 1.0)
            lo, hi = lo - pad, hi + pad
        else:
            pad = (hi - lo) * 0.05
            lo, hi = lo - pad, hi + pad
        self.y0, self.y1 = lo, hi

    def x(self, v: float) -> float:
        span = self.x1 - self.x0 or 1.0
        return self.left + (v - self.x0) / span * (self.right - self.left)

    def y(self, v: float) -> float:
        return self.bottom - (v - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def points(self, xs, ys) -> str:
        return " ".join(f"{_f(self.x(a))},{_f(self.y(b))}" for a, b in zip(xs, ys))

    def frame(self, title: str, panel_id: str) -> list[str]:
        out = [
            f'<g id="{panel_id}">',
            f'<rect x="{_f(self.left)}" y="{_f(self.top)}" width="{_f(self.right - self.left)}" '
            f'height="{_f(self.bottom - self.top)}" fill="none" stroke="#444" stroke-width="1"/>',
            f'<text x="{_f(self.left)}" y="{_f(self.top - 8)}" font-size="13" font-weight="bold">{escape(title)}</text>',
            f'<text x="{_f(self.left - 6)}" y="{_f(self.top + 10)}" font-size="10" text-anchor="end">{_label(self.y1)}</text>',
            f'<text x="{_f(self.left - 6)}" y="{_f(self.bottom)}" font-size="10" text-anchor="end">{_label(self.y0)}</text>',
            f'<text x="{_f(self.left)}" y="{_f(self.bottom + 14)}" font-size="10">{_label(self.x0)}</text>',
            f'<text x="{_f(self.right)}" y="{_f(self.bottom + 14)}" font-size="10" text-anchor="end">{_label(self.x1)}</text>',
        ]
        return out

    def vrule(self, x: float, rule_id: str) -> str:
        return (
            f'<line id="{rule_id}" x1="{_f(self.x(x))}" y1="{_f(self.top)}" x2="{_f(self.x(x))}" '
            f'y2="{_f(self.bottom)}" stroke="#666" stroke-dasharray="5,4"/>'
        )

    def hrule(self, y: float, rule_id: str) -> str:
        return (
            f'<line id="{rule_id}" x1="{_f(self.left)}" y1="{_f(self.y(y))}" x2="{_f(self.right)}" '
            f'y2="{_f(self.y(y))}" stroke="#aaa" stroke-dasharray="2,3"/>'
        )


def _polyline(line_id: str, points: str, color: str, dashed: bool = False, label: str | None = None) -> str:
    extra = ' stroke-dasharray="6,4"' if dashed else ""
    if label is not None:
        extra += f" data-label={quoteattr(label)}"
    return f'<polyline id="{line_id}" points="{points}" fill="none" stroke="{color}" stroke-width="1.5"{extra}/>'


def _document(height: float, body: list[str], title: str) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{_f(height)}" '
        f'viewBox="0 0 {WIDTH} {_f(height)}" font-family="sans-serif">\n'
        f"<title>{escape(title)}</title>\n"
        f'<rect width="100%" height="100%" fill="white"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def render_impact_svg(report: ImpactReport, title: str = "Causal impact") -> str:
    """Three stacked panels: original (smoothed), pointwise, cumulative."""
    n = report.n_episodes
    xs = np.arange(1, n + 1)
    slot = PANEL_HEIGHT + MARGIN_TOP + MARGIN_BOTTOM
    body: list[str] = []

    treated = report.original_treated.values
    control = report.original_counterfactual.values
    ax = _Axes(MARGIN_TOP, PANEL_HEIGHT, (1, n), [treated, control])
    body += ax.frame(f"original (rolling mean, window={report.window})", "panel-original")
    body.append(_polyline("original-counterfactual", ax.points(xs, control), "#555", dashed=True))
    body.append(_polyline("original-treated", ax.points(xs, treated), PALETTE[0]))
    body.append(ax.vrule(report.T, "intervention-original"))
    body.append("</g>")

    for i, (name, series) in enumerate((("pointwise", report.pointwise), ("cumulative", report.cumulative)), start=1):
        values = series.values
        ax = _Axes(MARGIN_TOP + i * slot, PANEL_HEIGHT, (1, n), [values], include_zero=True)
        body += ax.frame(name, f"panel-{name}")
        body.append(ax.hrule(0.0, f"zero-{name}"))
        body.append(_polyline(f"{name}-line", ax.points(xs, values), PALETTE[1]))
        body.append(ax.vrule(report.T, f"intervention-{name}"))
        body.append("</g>")

    return _document(3 * slot, body, title)


def render_forecast_svg(
    history: MeanSeries,
    bands: Sequence[tuple[str, ForecastBand]],
    title: str = "Forecast",
) -> str:
    """Measured history followed by one shaded band and forecast line per label."""
    if not bands:
        raise ValidationError("at least one band is required")
    horizon, level = bands[0][1].horizon, bands[0][1].level
    for label, band in bands:
        if band.horizon != horizon or band.level != level:
            raise ValidationError(f"band {label!r} does not share horizon {horizon} and level {level}")
    hist = history.values
    n = hist.size
    xs_hist = np.arange(1, n + 1)
    xs_fc = np.arange(n + 1, n + horizon + 1)
    height = 2 * PANEL_HEIGHT
    ax = _Axes(MARGIN_TOP, height, (1, n + horizon), [hist] + [np.r_[b.lower, b.upper] for _, b in bands])

    body = ax.frame(f"{title} ({level:.0%} prediction intervals)", "panel-forecast")
    body.append(_polyline("history", ax.points(xs_hist, hist), "#333"))
    body.append(ax.vrule(n + 0.5, "forecast-start"))
    for i, (label, band) in enumerate(bands):
        color = PALETTE[i % len(PALETTE)]
        outline = ax.points(xs_fc, band.upper) + " " + ax.points(xs_fc[::-1], band.lower[::-1])
        body.append(
            f'<polygon id="band-{i}" points="{outline}" fill="{color}" fill-opacity="0.2" '
            f'stroke="none" data-label={quoteattr(label)}/>'
        )
        body.append(_polyline(f"forecast-{i}", ax.points(xs_fc, band.point), color, label=label))
    body.append("</g>")

    lx, ly = ax.right - 150, ax.top + 12
    body.append('<g id="legend">')
    for i, (label, _) in enumerate(bands):
        color = PALETTE[i % len(PALETTE)]
        y = ly + 16 * i
        body.append(f'<rect x="{_f(lx)}" y="{_f(y - 8)}" width="12" height="10" fill="{color}" fill-opacity="0.6"/>')
        body.append(f'<text x="{_f(lx + 18)}" y="{_f(y)}" font-size="11">{escape(label)}</text>')
    body.append("</g>")
    return _document(height + MARGIN_TOP + MARGIN_BOTTOM, body, title)
