"""SVG drawings of channels and certificates."""

from __future__ import annotations

import logging
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from circular_visibility.channel import Channel
from circular_visibility.engine import VisibilityCertificate
from circular_visibility.structs import ArcSegment, Point, Side

_SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class RenderSpec:
    """Canvas size and what to draw."""

    width: int = 640
    height: int = 640
    margin: float = 0.05
    show_arc: bool = True
    show_restrictions: bool = True
    stroke_width: float = 1.5

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            size = f"{self.width}x{self.height}"
            raise ValueError(f"Canvas must be positive, got {size}.")
        if not 0.0 <= self.margin < 0.5:
            raise ValueError(f"Margin must lie in [0, 0.5), got {self.margin}.")


class _Frame:
    """Maps channel coordinates onto the canvas, y pointing down."""

    def __init__(self, ch: Channel, spec: RenderSpec) -> None:
        pts = ch.sample_points
        self._lo = pts.min(axis=0)
        extent = pts.max(axis=0) - self._lo
        usable = 1.0 - 2.0 * spec.margin
        self.scale = min(
            spec.width * usable / max(extent[0], 1e-12),
            spec.height * usable / max(extent[1], 1e-12),
        )
        self._x0 = (spec.width - self.scale * extent[0]) / 2.0
        self._y0 = (spec.height + self.scale * extent[1]) / 2.0

    def coords(self, q: Point) -> tuple[str, str]:
        x = self._x0 + self.scale * (q.x - self._lo[0])
        y = self._y0 - self.scale * (q.y - self._lo[1])
        return f"{x:.3f}", f"{y:.3f}"

    def xy(self, q: Point) -> str:
        return ",".join(self.coords(q))


def _path_data(arcs: list[ArcSegment], frame: _Frame) -> str:
    parts = [f"M {frame.xy(arcs[0].start)}"]
    for arc in arcs:
        if arc.is_line():
            parts.append(f"L {frame.xy(arc.end)}")
            continue
        r = arc.radius * frame.scale
        large = 1 if abs(arc.sweep) > math.pi else 0
        # Flipping y turns counterclockwise arcs into negative-angle sweeps.
        sweep = 0 if arc.sweep > 0 else 1
        parts.append(f"A {r:.3f} {r:.3f} 0 {large} {sweep} {frame.xy(arc.end)}")
    return " ".join(parts)


def _add_path(
    parent: ET.Element, arcs: list[ArcSegment], frame: _Frame, **attrs: str
) -> ET.Element:
    node = ET.SubElement(parent, "path", d=_path_data(arcs, frame), fill="none")
    for key, value in attrs.items():
        node.set(key.replace("_", "-"), value)
    return node


def render_svg(
    ch: Channel,
    cert: VisibilityCertificate | None = None,
    p: Point | None = None,
    spec: RenderSpec = RenderSpec(),
) -> str:
    """Draw the channel, and optionally a query point and its certificate.

    sigma is drawn in blue and every boundary segment as its own path.
    Left restrictions are hollow circles, right restrictions filled.
    """
    frame = _Frame(ch, spec)
    stroke = f"{spec.stroke_width:g}"
    root = ET.Element(
        "svg",
        xmlns=_SVG_NS,
        width=str(spec.width),
        height=str(spec.height),
        viewBox=f"0 0 {spec.width} {spec.height}",
    )
    channel = ET.SubElement(root, "g", id="channel")
    _add_path(channel, [ch.sigma], frame, stroke="#1f5fbf", stroke_width=stroke)
    for j, seg in enumerate(ch.kappa, start=1):
        _add_path(
            channel, [seg], frame, id=f"kappa-{j}", stroke="black", stroke_width=stroke
        )
    if cert is not None and spec.show_arc:
        style = {"stroke": "#2a9d3a"}
        if not cert.visible:
            style = {"stroke": "#c0392b", "stroke_dasharray": "6 3"}
        _add_path(root, [cert.arc.arc], frame, id="arc", stroke_width=stroke, **style)
    if cert is not None and cert.sequence is not None and spec.show_restrictions:
        marks = ET.SubElement(root, "g", id="restrictions")
        for q in cert.sequence:
            x, y = frame.coords(q.point)
            ET.SubElement(
                marks,
                "circle",
                cx=x,
                cy=y,
                r="4",
                stroke="#c0392b",
                fill="none" if q.side is Side.LEFT else "#c0392b",
            )
    if p is not None:
        x, y = frame.coords(p)
        ET.SubElement(root, "circle", id="query", cx=x, cy=y, r="3", fill="black")
    return ET.tostring(root, encoding="unicode")


def write_svg(
    path: Path,
    ch: Channel,
    cert: VisibilityCertificate | None = None,
    p: Point | None = None,
    spec: RenderSpec = RenderSpec(),
) -> None:
    """Render to a file."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(render_svg(ch, cert, p, spec))
    logging.debug(f"Wrote SVG to {path}.")
