"""The channel data model: a starting arc plus an arc-spline boundary."""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterator, Sequence

import numpy as np

from circular_visibility.geometry import (
    CoincidentSupports,
    OverlapError,
    intersect,
    intersect_supports,
)
from circular_visibility.structs import (
    DEFAULT_TOLERANCES,
    ArcSegment,
    Direction,
    Point,
    Support,
    Tolerances,
)

_RAY_ATTEMPTS = 4
_SAMPLES_PER_SEGMENT = 9


class ChannelFormatError(ValueError):
    """Raised when channel JSON does not have the expected structure."""


@dataclass(frozen=True)
class ChannelDiagnostic:
    """One violated channel invariant."""

    code: str
    message: str
    segment: int | None = None

    def to_json(self) -> dict[str, Any]:
        """Serialize for the command line."""
        return {"code": self.code, "message": self.message, "segment": self.segment}


class ChannelInvalid(Exception):
    """Raised when a channel fails validation."""

    code = "ChannelInvalid"

    def __init__(self, diagnostics: Sequence[ChannelDiagnostic]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


class NotClosed(ChannelInvalid):
    """Consecutive boundary segments do not meet."""

    code = "NotClosed"


class SelfIntersecting(ChannelInvalid):
    """The closed boundary meets itself."""

    code = "SelfIntersecting"


class WrongOrientation(ChannelInvalid):
    """The channel interior is not locally left of the starting arc."""

    code = "WrongOrientation"


class NonConvexStartCorner(ChannelInvalid):
    """The boundary does not leave the starting arc to the left."""

    code = "NonConvexStartCorner"


_ERRORS: dict[str, type[ChannelInvalid]] = {
    cls.code: cls
    for cls in (NotClosed, SelfIntersecting, WrongOrientation, NonConvexStartCorner)
}


class Location(enum.Enum):
    """Where a point lies relative to a channel."""

    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class ArcSpline:
    """A path of arc segments, each starting where the previous one ends.

    Global parameters run over [0, n]: T = (j - 1) + t is parameter t on
    segment j (1-based). A breakpoint belongs to the later segment.
    """

    segments: tuple[ArcSegment, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[ArcSegment]:
        return iter(self.segments)

    def segment(self, j: int) -> ArcSegment:
        """Segment j, 1-based."""
        return self.segments[j - 1]

    def locate(self, T: float) -> tuple[int, float]:
        """Split a global parameter into (segment index, local parameter)."""
        n = len(self.segments)
        if T >= n:
            return n, 1.0
        j = int(math.floor(max(T, 0.0)))
        return j + 1, max(T, 0.0) - j

    def point_at(self, T: float) -> Point:
        """The point at global parameter T."""
        j, t = self.locate(T)
        return self.segment(j).point_at(t)

    def reversed(self) -> ArcSpline:
        """The same path traversed backwards."""
        return ArcSpline(tuple(s.reversed() for s in reversed(self.segments)))

    def to_json(self) -> list[dict[str, Any]]:
        """Serialize as a list of segments."""
        return [s.to_json() for s in self.segments]


@dataclass(frozen=True)
class Channel:
    """A starting arc sigma and a boundary kappa closing it.

    Segment index 0 names sigma and j >= 1 names kappa_j.
    """

    sigma: ArcSegment
    kappa: ArcSpline
    base_tol: Tolerances = field(default=DEFAULT_TOLERANCES, compare=False)

    @property
    def n(self) -> int:
        """Number of boundary segments."""
        return len(self.kappa)

    def segment(self, j: int) -> ArcSegment:
        """sigma for j = 0, kappa_j otherwise."""
        return self.sigma if j == 0 else self.kappa.segment(j)

    def segments(self) -> list[ArcSegment]:
        """sigma followed by the boundary segments."""
        return [self.sigma, *self.kappa.segments]

    @cached_property
    def sample_points(self) -> np.ndarray:
        """Points sampled along sigma and kappa, shape (m, 2)."""
        ts = np.linspace(0.0, 1.0, _SAMPLES_PER_SEGMENT)
        pts = [s.point_at(float(t)).to_json() for s in self.segments() for t in ts]
        return np.asarray(pts, dtype=float)

    @cached_property
    def diameter(self) -> float:
        """Length of the bounding box diagonal."""
        pts = self.sample_points
        extent = pts.max(axis=0) - pts.min(axis=0)
        return float(np.hypot(extent[0], extent[1]))

    @cached_property
    def tol(self) -> Tolerances:
        """Tolerances scaled to this channel."""
        return self.base_tol.scaled(self.diameter)

    def default_d_tol(self) -> float:
        """Violation tolerance used when a query names none."""
        return 1e-6 * self.diameter

    def cap(self) -> float:
        """Largest admissible radius for constructed arcs."""
        return 4.0 * self.diameter

    def to_json(self) -> dict[str, Any]:
        """Serialize as {"sigma": {...}, "kappa": [...]}."""
        return {"sigma": self.sigma.to_json(), "kappa": self.kappa.to_json()}


def _segment_boxes(segments: Sequence[ArcSegment], pad: float) -> np.ndarray:
    """Axis-aligned boxes (xmin, ymin, xmax, ymax) covering each segment."""
    ts = np.linspace(0.0, 1.0, _SAMPLES_PER_SEGMENT)
    boxes = np.empty((len(segments), 4))
    for i, s in enumerate(segments):
        pts = np.asarray([s.point_at(float(t)).to_json() for t in ts])
        # The sagitta between samples is below chord * |bulge| / 4 per piece.
        slack = pad + s.chord_length * abs(math.tan(s.sweep / 32.0))
        boxes[i, :2] = pts.min(axis=0) - slack
        boxes[i, 2:] = pts.max(axis=0) + slack
    return boxes


def _candidate_pairs(boxes: np.ndarray) -> list[tuple[int, int]]:
    overlap = (
        (boxes[:, None, 0] <= boxes[None, :, 2])
        & (boxes[None, :, 0] <= boxes[:, None, 2])
        & (boxes[:, None, 1] <= boxes[None, :, 3])
        & (boxes[None, :, 1] <= boxes[:, None, 3])
    )
    i, j = np.nonzero(np.triu(overlap, k=1))
    return list(zip(i.tolist(), j.tolist()))


def _closure_diagnostics(
    segments: Sequence[ArcSegment], eps: float
) -> list[ChannelDiagnostic]:
    diagnostics = []
    m = len(segments)
    for i in range(m):
        gap = segments[i].end.dist(segments[(i + 1) % m].start)
        if gap > eps:
            diagnostics.append(
                ChannelDiagnostic(
                    "NotClosed",
                    f"Segment {i} ends {gap:.3g} away from the start of "
                    f"segment {(i + 1) % m}.",
                    i,
                )
            )
    return diagnostics


def _simplicity_diagnostics(
    segments: Sequence[ArcSegment], tol: Tolerances
) -> list[ChannelDiagnostic]:
    m = len(segments)
    diagnostics = []
    for i, j in _candidate_pairs(_segment_boxes(segments, tol.eps_geom)):
        try:
            events = intersect(segments[i], segments[j], tol)
        except OverlapError:
            events = None
        if events is not None:
            allowed = []
            if j == i + 1:
                allowed.append((1.0, 0.0))
            if i == 0 and j == m - 1:
                allowed.append((0.0, 1.0))
            events = [
                e
                for e in events
                if not any(
                    abs(e.t_self - a) <= 1e-9 and abs(e.t_other - b) <= 1e-9
                    for a, b in allowed
                )
            ]
            if not events:
                continue
        diagnostics.append(
            ChannelDiagnostic(
                "SelfIntersecting", f"Segments {i} and {j} intersect.", i
            )
        )
    return diagnostics


def _corner_diagnostics(
    sigma: ArcSegment, kappa: ArcSpline, tol: Tolerances
) -> list[ChannelDiagnostic]:
    diagnostics = []
    if sigma.normal_at(1.0).dot(kappa.segment(1).tangent_at(0.0)) <= tol.eps_angle:
        diagnostics.append(
            ChannelDiagnostic(
                "NonConvexStartCorner",
                "The boundary does not leave sigma(1) to the left.",
                1,
            )
        )
    last = kappa.segment(len(kappa))
    if sigma.normal_at(0.0).dot(last.tangent_at(1.0)) >= -tol.eps_angle:
        diagnostics.append(
            ChannelDiagnostic(
                "NonConvexStartCorner",
                "The boundary does not arrive at sigma(0) from the left.",
                len(kappa),
            )
        )
    return diagnostics


def check_channel(
    sigma: ArcSegment, kappa: ArcSpline, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[ChannelDiagnostic]:
    """Every violated channel invariant, in order of severity."""
    if len(kappa) == 0:
        return [ChannelDiagnostic("NotClosed", "The boundary has no segments.")]
    ch = Channel(sigma, kappa, tol)
    scaled = ch.tol
    segments = ch.segments()
    diagnostics = _closure_diagnostics(segments, scaled.eps_geom)
    if diagnostics:
        return diagnostics
    diagnostics = _simplicity_diagnostics(segments, scaled)
    if diagnostics:
        return diagnostics
    if not _interior_left_of_sigma(ch):
        return [
            ChannelDiagnostic(
                "WrongOrientation", "The interior is not left of sigma.", 0
            )
        ]
    return _corner_diagnostics(sigma, kappa, scaled)


def _interior_left_of_sigma(ch: Channel) -> bool:
    mid = ch.sigma.point_at(0.5)
    clearance = min(s.distance_to(mid) for s in ch.kappa)
    offset = min(1e-4 * ch.diameter, 0.25 * clearance)
    inside = mid + ch.sigma.normal_at(0.5).as_point() * offset
    return point_in_channel(ch, inside) is Location.INTERIOR


def validate_channel(
    sigma: ArcSegment, kappa: ArcSpline, tol: Tolerances = DEFAULT_TOLERANCES
) -> Channel:
    """Build a channel, raising the matching ChannelInvalid on failure."""
    diagnostics = check_channel(sigma, kappa, tol)
    if diagnostics:
        logging.debug(f"Channel rejected: {diagnostics[0].message}")
        raise _ERRORS[diagnostics[0].code](diagnostics)
    ch = Channel(sigma, kappa, tol)
    logging.debug(f"Validated channel with {ch.n} segments.")
    return ch


def point_in_channel(ch: Channel, q: Point) -> Location:
    """Crossing-parity location test with arc-aware ray casting."""
    eps = ch.tol.eps_geom
    segments = ch.segments()
    if any(s.distance_to(q) <= eps for s in segments):
        return Location.BOUNDARY
    rng = np.random.default_rng(0)
    origin = q
    for attempt in range(_RAY_ATTEMPTS + 1):
        if attempt == _RAY_ATTEMPTS:
            # Every direction grazed something: nudge the origin.
            nudge = Direction.from_angle(rng.uniform(0, 2 * np.pi)).as_point()
            origin = q + nudge * eps
        ray = Direction.from_angle(rng.uniform(0, 2 * np.pi))
        crossings = _count_crossings(segments, origin, ray, ch.tol)
        if crossings is not None:
            return Location.INTERIOR if crossings % 2 == 1 else Location.EXTERIOR
    logging.debug(f"Ray casting from {q} stayed ambiguous; counting anyway.")
    crossings = _count_crossings(segments, origin, ray, ch.tol, strict=False)
    assert crossings is not None
    return Location.INTERIOR if crossings % 2 == 1 else Location.EXTERIOR


def _count_crossings(
    segments: Sequence[ArcSegment],
    origin: Point,
    ray: Direction,
    tol: Tolerances,
    strict: bool = True,
) -> int | None:
    """Crossings of the ray with the boundary, None if a hit is ambiguous."""
    line = Support(origin, ray, 0.0)
    count = 0
    for s in segments:
        try:
            hits = intersect_supports(line, s.support, tol)
        except CoincidentSupports:
            if strict:
                return None
            continue
        for x, touch in hits:
            if ray.dot(x - origin) <= 0:
                continue
            t = s.param_of(x)
            slack = tol.eps_geom / s.length
            if t < -slack or t > 1.0 + slack:
                continue
            near_end = t < slack or t > 1.0 - slack
            if strict and (touch or near_end):
                return None
            if not touch:
                count += 1
    return count


def channel_from_json(obj: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> Channel:
    """Parse and validate channel JSON."""
    if not isinstance(obj, dict) or "sigma" not in obj or "kappa" not in obj:
        raise ChannelFormatError("Channel JSON needs 'sigma' and 'kappa' keys.")
    if not isinstance(obj["kappa"], list):
        raise ChannelFormatError("'kappa' must be a list of segments.")
    try:
        sigma = ArcSegment.from_json(obj["sigma"])
        kappa = ArcSpline(tuple(ArcSegment.from_json(s) for s in obj["kappa"]))
    except ValueError as e:
        raise ChannelFormatError(str(e)) from e
    return validate_channel(sigma, kappa, tol)


def load_channel(path: Path, tol: Tolerances = DEFAULT_TOLERANCES) -> Channel:
    """Load a channel from a JSON file."""
    with open(path, "r", encoding="utf-8") as f:
        obj = json.load(f)
    return channel_from_json(obj, tol)


def dump_channel(ch: Channel, path: Path) -> None:
    """Save a channel as JSON."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(ch.to_json(), f)
