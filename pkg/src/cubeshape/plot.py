"""Deterministic SVG rendering of shapes and geodesic arcs in the Gauss domain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .enumeration import FieldRecord

X_MIN, X_MAX = -0.05, 0.55
Y_MIN = 0.9
PX_PER_UNIT = 1000.0
MARGIN = 20.0
PALETTE = ("#1f5fbf", "#111111", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085", "#7f8c8d")
_JUMP = 0.05  # consecutive samples further apart than this start a new piece


@dataclass(frozen=True)
class Frame:
    y_max: float

    @property
    def width(self) -> float:
        return (X_MAX - X_MIN) * PX_PER_UNIT + 2 * MARGIN

    @property
    def height(self) -> float:
        return (self.y_max - Y_MIN) * PX_PER_UNIT + 2 * MARGIN

    def px(self, z: complex) -> tuple[float, float]:
        return (
            MARGIN + (z.real - X_MIN) * PX_PER_UNIT,
            MARGIN + (self.y_max - z.imag) * PX_PER_UNIT,
        )


def split_pieces(samples: Sequence[complex]) -> list[list[complex]]:
    """Cut a reduced arc sample list wherever the reduction jumps."""
    pieces: list[list[complex]] = []
    for z in samples:
        if pieces and abs(z - pieces[-1][-1]) <= _JUMP:
            pieces[-1].append(z)
        else:
            pieces.append([z])
    return [p for p in pieces if len(p) > 1]


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _path(frame: Frame, pieces: Sequence[Sequence[complex]]) -> str:
    parts = []
    for piece in pieces:
        pts = [frame.px(z) for z in piece]
        parts.append("M" + " L".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts))
    return " ".join(parts)


def _boundary(frame: Frame) -> str:
    arc = [complex(math.cos(a), math.sin(a)) for a in [math.pi / 3 + k * (math.pi / 6) / 60 for k in range(61)]]
    vert0 = [complex(0, 1), complex(0, frame.y_max)]
    vert_half = [complex(0.5, math.sqrt(3) / 2), complex(0.5, frame.y_max)]
    return _path(frame, [arc, vert0, vert_half])


def render_svg(records: Sequence[FieldRecord], arcs: dict[str, Sequence[complex]], y_max: float | None = None) -> str:
    """SVG text with one ``<path class="arc">`` per class and one marker per record."""
    class_ids = sorted(set(arcs) | {rec.class_id for rec in records})
    colors = {cid: PALETTE[k % len(PALETTE)] for k, cid in enumerate(class_ids)}
    if y_max is None:
        ys = [z.imag for s in arcs.values() for z in s] + [rec.shape[1] for rec in records]
        y_max = math.ceil((max(ys, default=2.0) + 0.05) * 10) / 10
    frame = Frame(y_max)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(frame.width)}" height="{_fmt(frame.height)}" '
        f'viewBox="0 0 {_fmt(frame.width)} {_fmt(frame.height)}">',
        f'<rect x="0" y="0" width="{_fmt(frame.width)}" height="{_fmt(frame.height)}" fill="white"/>',
        f'<path class="boundary" d="{_boundary(frame)}" fill="none" stroke="#999999" stroke-width="1"/>',
    ]
    for cid in sorted(arcs):
        out.append(
            f'<path class="arc" data-class="{cid}" d="{_path(frame, split_pieces(arcs[cid]))}" '
            f'fill="none" stroke="{colors[cid]}" stroke-width="1"/>'
        )
    for rec in records:
        x, y = frame.px(complex(*rec.shape))
        out.append(
            f'<circle class="marker" data-class="{rec.class_id}" cx="{_fmt(x)}" cy="{_fmt(y)}" r="2" '
            f'fill="{colors[rec.class_id]}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_svg(records: Sequence[FieldRecord], arcs: dict[str, Sequence[complex]], out, y_max: float | None = None) -> str:
    text = render_svg(records, arcs, y_max)
    with open(out, "w") as fh:
        fh.write(text)
    return text


def distance_to_pieces(p: tuple[float, float], segments: Sequence[Sequence[tuple[float, float]]]) -> float:
    """Distance from a point to a family of polylines (same units as input)."""
    best = math.inf
    px, py = p
    for poly in segments:
        for (x1, y1), (x2, y2) in zip(poly, poly[1:]):
            dx, dy = x2 - x1, y2 - y1
            L = dx * dx + dy * dy
            t = 0.0 if L == 0 else max(0.0, min(1.0, ((px - x1) * dx + (py - y1) * dy) / L))
            best = min(best, math.hypot(px - x1 - t * dx, py - y1 - t * dy))
    return best


def parse_svg_paths(text: str) -> tuple[dict[str, list[list[tuple[float, float]]]], list[tuple[str, float, float]]]:
    """Arc polylines by class and marker centres, read back from rendered SVG."""
    import re

    arcs: dict[str, list[list[tuple[float, float]]]] = {}
    for cid, d in re.findall(r'<path class="arc" data-class="([^"]+)" d="([^"]*)"', text):
        polys = []
        for sub in filter(None, d.split("M")):
            pts = [tuple(float(v) for v in pair.split(",")) for pair in sub.replace("L", " ").split()]
            polys.append(pts)
        arcs[cid] = polys
    markers = [
        (cid, float(x), float(y))
        for cid, x, y in re.findall(r'<circle class="marker" data-class="([^"]+)" cx="([^"]+)" cy="([^"]+)"', text)
    ]
    return arcs, markers
