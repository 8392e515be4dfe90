"""Cartography maps and correlation trend charts as deterministic SVG.

SVG is built by plain string assembly: text-based output diffs cleanly in
golden-file tests and needs no graphics dependency. Identical inputs and
seed produce byte-identical files; every coordinate is written with fixed
precision.

Map conventions: color encodes the heuristic tag (support green,
contradict blue, none gray); the marker encodes the distribution (circle
for in-distribution, cross for OOD). Axes are pinned to the mathematical
bounds, variability 0..0.5 and confidence 0..1, so maps from different
epochs stay visually comparable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .correlation import CorrelationSeries, Stratum
from .dynamics import CartographyPoint
from .ingest import Distribution

TAG_COLORS = {"support": "green", "contradict": "blue", "none": "gray"}
DISTRIBUTION_MARKERS = {
    Distribution.IN_DISTRIBUTION: "circle",
    Distribution.OOD: "cross",
}
STRATUM_COLORS = {
    Stratum.TRAIN: "#1f77b4",
    Stratum.EVAL_IN_DISTRIBUTION: "#ff7f0e",
    Stratum.EVAL_OOD: "#2ca02c",
}

_WIDTH = 720
_HEIGHT = 540
_LEFT = 70
_TOP = 50
_PLOT_W = 480
_PLOT_H = 430


class RenderError(ValueError):
    """Raised when there is nothing drawable."""


@dataclass(frozen=True)
class MapStyle:
    color_by_tag: dict = field(default_factory=lambda: dict(TAG_COLORS))
    marker_by_distribution: dict = field(default_factory=lambda: dict(DISTRIBUTION_MARKERS))
    sample_fraction: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ValueError(f"sample_fraction must be in (0, 1], got {self.sample_fraction}")


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _map_x(variability: float) -> float:
    return _LEFT + (variability / 0.5) * _PLOT_W


def _map_y(confidence: float) -> float:
    return _TOP + (1.0 - confidence) * _PLOT_H


def subsample_count(fraction: float, total: int) -> int:
    """Glyph count contract: round(fraction * total), half away from zero."""
    return int(fraction * total + 0.5)


def _select(points: Sequence[CartographyPoint], style: MapStyle) -> list[CartographyPoint]:
    k = subsample_count(style.sample_fraction, len(points))
    if k >= len(points):
        return list(points)
    rng = random.Random(style.seed)
    chosen = sorted(rng.sample(range(len(points)), k))
    return [points[i] for i in chosen]


def _glyph(x: float, y: float, marker: str, color: str) -> str:
    if marker == "circle":
        return (
            f'<circle class="pt" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" '
            f'fill="{color}" fill-opacity="0.65"/>'
        )
    arm = 3.0
    return (
        f'<path class="pt" d="M {_fmt(x - arm)} {_fmt(y - arm)} L {_fmt(x + arm)} {_fmt(y + arm)} '
        f'M {_fmt(x - arm)} {_fmt(y + arm)} L {_fmt(x + arm)} {_fmt(y - arm)}" '
        f'stroke="{color}" stroke-width="1.5" fill="none"/>'
    )


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_LEFT}" y="28" font-size="16">{escape(title)}</text>',
    ]


def _axes(x_label: str, y_label: str, x_ticks: list[tuple[float, str]], y_ticks: list[tuple[float, str]]) -> list[str]:
    right = _LEFT + _PLOT_W
    bottom = _TOP + _PLOT_H
    parts = [
        f'<rect x="{_LEFT}" y="{_TOP}" width="{_PLOT_W}" height="{_PLOT_H}" '
        f'fill="none" stroke="black" stroke-width="1"/>'
    ]
    for px, label in x_ticks:
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{bottom}" x2="{_fmt(px)}" y2="{bottom + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{bottom + 20}" font-size="11" text-anchor="middle">{label}</text>'
        )
    for py, label in y_ticks:
        parts.append(
            f'<line x1="{_LEFT - 5}" y1="{_fmt(py)}" x2="{_LEFT}" y2="{_fmt(py)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_LEFT - 9}" y="{_fmt(py + 4)}" font-size="11" text-anchor="end">{label}</text>'
        )
    parts.append(
        f'<text x="{_fmt(_LEFT + _PLOT_W / 2)}" y="{bottom + 42}" font-size="13" '
        f'text-anchor="middle">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="22" y="{_fmt(_TOP + _PLOT_H / 2)}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 22 {_fmt(_TOP + _PLOT_H / 2)})">{escape(y_label)}</text>'
    )
    return parts


def render_map(
    points: Sequence[CartographyPoint],
    style: MapStyle,
    out: str | Path,
    title: str | None = None,
) -> str:
    """Write one cartography scatter map; returns the SVG text.

    Subsampling is uniform under the style's seeded generator, and the
    glyph count is exactly round(fraction * len(points)).
    """
    if not points:
        raise RenderError("no cartography points to render")
    if title is None:
        first = points[0]
        title = f"{first.split.value} cartography, epoch {first.epoch}"
    selected = _select(points, style)
    x_ticks = [(_map_x(v / 10), f"{v / 10:.1f}") for v in range(0, 6)]
    y_ticks = [(_map_y(v / 5), f"{v / 5:.1f}") for v in range(0, 6)]
    parts = _header(title)
    parts.extend(_axes("variability", "confidence", x_ticks, y_ticks))
    for pt in selected:
        color = style.color_by_tag.get(pt.heuristic_tag, "gray")
        marker = style.marker_by_distribution.get(pt.distribution, "circle")
        parts.append(_glyph(_map_x(pt.variability), _map_y(pt.confidence), marker, color))
    legend_x = _LEFT + _PLOT_W + 18
    y = _TOP + 10
    parts.append(f'<text x="{legend_x}" y="{y}" font-size="12">tags</text>')
    for tag in ("support", "contradict", "none"):
        y += 18
        color = style.color_by_tag.get(tag, "gray")
        parts.append(f'<rect x="{legend_x}" y="{y - 9}" width="10" height="10" fill="{color}"/>')
        parts.append(f'<text x="{legend_x + 16}" y="{y}" font-size="12">{tag}</text>')
    y += 28
    parts.append(f'<text x="{legend_x}" y="{y}" font-size="12">markers</text>')
    y += 18
    parts.append(_glyph(legend_x + 5, y - 4, "circle", "black").replace(' class="pt"', ""))
    parts.append(f'<text x="{legend_x + 16}" y="{y}" font-size="12">in_distribution</text>')
    y += 18
    parts.append(_glyph(legend_x + 5, y - 4, "cross", "black").replace(' class="pt"', ""))
    parts.append(f'<text x="{legend_x + 16}" y="{y}" font-size="12">ood</text>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    Path(out).write_text(svg, encoding="utf-8")
    return svg


def _trend_x(epoch: int, max_epoch: int) -> float:
    if max_epoch <= 1:
        return _LEFT + _PLOT_W / 2
    return _LEFT + (epoch - 1) / (max_epoch - 1) * _PLOT_W


def _trend_y(rho: float) -> float:
    return _TOP + (1.0 - rho) / 2.0 * _PLOT_H


def render_trends(
    series: Sequence[CorrelationSeries],
    out: str | Path,
    title: str | None = None,
) -> str:
    """Write one trend chart; one polyline per series, keyed by stratum.

    Undefined points break the line into separate segments; an isolated
    defined point becomes a dot. Raises when every point is undefined.
    """
    defined = [pt for s in series for pt in s.points if pt.rho is not None]
    if not defined:
        raise RenderError("all correlation points are undefined")
    max_epoch = max(pt.epoch for s in series for pt in s.points)
    if title is None:
        first = series[0]
        title = f"rho({first.measure.value}, confidence), {first.class_filter.value} samples"
    x_ticks = [(_trend_x(e, max_epoch), str(e)) for e in range(1, max_epoch + 1)]
    y_ticks = [(_trend_y(v / 2), f"{v / 2:.1f}") for v in range(-2, 3)]
    parts = _header(title)
    parts.extend(_axes("epoch", "rho", x_ticks, y_ticks))
    zero_y = _trend_y(0.0)
    parts.append(
        f'<line x1="{_LEFT}" y1="{_fmt(zero_y)}" x2="{_LEFT + _PLOT_W}" y2="{_fmt(zero_y)}" '
        f'stroke="lightgray" stroke-dasharray="4 3"/>'
    )
    for s in series:
        color = STRATUM_COLORS.get(s.stratum, "black")
        segment: list[tuple[float, float]] = []
        segments: list[list[tuple[float, float]]] = []
        for pt in s.points:
            if pt.rho is None:
                if segment:
                    segments.append(segment)
                    segment = []
                continue
            segment.append((_trend_x(pt.epoch, max_epoch), _trend_y(pt.rho)))
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) == 1:
                x, y = seg[0]
                parts.append(
                    f'<circle class="trend-dot" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{color}"/>'
                )
            else:
                coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in seg)
                parts.append(
                    f'<polyline class="trend-line" points="{coords}" fill="none" '
                    f'stroke="{color}" stroke-width="1.8"/>'
                )
    legend_x = _LEFT + _PLOT_W + 18
    y = _TOP + 10
    seen: list[Stratum] = []
    for s in series:
        if s.stratum not in seen:
            seen.append(s.stratum)
    for stratum in seen:
        y += 18
        color = STRATUM_COLORS.get(stratum, "black")
        parts.append(
            f'<line x1="{legend_x}" y1="{y - 4}" x2="{legend_x + 14}" y2="{y - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{legend_x + 20}" y="{y}" font-size="12">{stratum.value}</text>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    Path(out).write_text(svg, encoding="utf-8")
    return svg
