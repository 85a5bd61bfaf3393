"""Reference channels with known answers, and seeded random channels."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from circular_visibility.channel import (
    ArcSpline,
    Channel,
    ChannelInvalid,
    Location,
    point_in_channel,
    validate_channel,
)
from circular_visibility.structs import ArcSegment, Point


@dataclass(frozen=True)
class Fixture:
    """A channel with points whose visibility is known."""

    name: str
    channel: Channel
    visible: tuple[Point, ...] = ()
    blocked: tuple[Point, ...] = ()


def _path(
    points: Sequence[tuple[float, float]], bulges: Sequence[float]
) -> ArcSpline:
    pts = [Point(x, y) for x, y in points]
    return ArcSpline(
        tuple(ArcSegment(a, b, k) for a, b, k in zip(pts, pts[1:], bulges))
    )


def sq1() -> Fixture:
    """The unit square with sigma along the bottom."""
    sigma = ArcSegment(Point(0.0, 0.0), Point(1.0, 0.0))
    kappa = _path([(1, 0), (1, 1), (0, 1), (0, 0)], [0.0] * 3)
    return Fixture("sq1", validate_channel(sigma, kappa), (Point(0.5, 0.5),))


def hk1() -> Fixture:
    """A U-shaped hook of width 1: up the left leg, across, down the right.

    The bottom of the right leg cannot be reached by any arc.
    """
    sigma = ArcSegment(Point(0.0, 0.0), Point(1.0, 0.0))
    corners = [(1, 0), (1, 6), (4, 6), (4, 0), (5, 0), (5, 7), (0, 7), (0, 0)]
    kappa = _path(corners, [0.0] * 7)
    return Fixture(
        "hk1",
        validate_channel(sigma, kappa),
        visible=(Point(0.5, 3.0), Point(0.5, 6.5)),
        blocked=(Point(4.5, 0.5),),
    )


def sp1() -> Fixture:
    """A corridor of width 0.5 between two semicircle spirals, entered
    at its outer end.

    Half turns alternate between centers (0, 0) and (0.5, 0).
    """
    # Inner wall traversed outside-in, then the closing segment, then the
    # outer wall inside-out.
    inner = [(3.0, 0.0), (-2.0, 0.0), (2.0, 0.0), (-1.0, 0.0), (1.0, 0.0)]
    outer = [(1.5, 0.0), (-1.5, 0.0), (2.5, 0.0), (-2.5, 0.0), (3.5, 0.0)]
    points = inner + outer
    bulges = [-1.0] * 4 + [0.0] + [1.0] * 4
    sigma = ArcSegment(Point(3.5, 0.0), Point(3.0, 0.0))
    ch = validate_channel(sigma, _path(points, bulges))
    deep = Point(0.0, 1.25)
    angle = -math.pi / 3.0
    near_mouth = Point(0.5 + 2.75 * math.cos(angle), 2.75 * math.sin(angle))
    return Fixture("sp1", ch, visible=(near_mouth,), blocked=(deep,))


def near_degenerate() -> Fixture:
    """A convex channel whose boundary vertices all lie on one circle.

    The arc of that circle from sigma(1) to the query point touches the
    boundary at every vertex it passes.
    """
    center, radius = Point(3.0, 0.0), 3.0
    angles = np.radians(np.arange(0.0, 181.0, 30.0))
    points = [
        (center.x + radius * math.cos(a), center.y + radius * math.sin(a))
        for a in angles
    ]
    # Walls bulge outward past the circle.
    bulges = [math.tan(math.radians(40.0) / 4.0)] * (len(points) - 1)
    sigma = ArcSegment(Point(0.0, 0.0), Point(6.0, 0.0))
    ch = validate_channel(sigma, _path(points, bulges))
    a = math.radians(75.0)
    p = Point(center.x + radius * math.cos(a), center.y + radius * math.sin(a))
    return Fixture("near_degenerate", ch, visible=(p, Point(3.0, 1.5)))


def all_fixtures() -> list[Fixture]:
    """Every named fixture."""
    return [sq1(), hk1(), sp1(), near_degenerate()]


def random_channel(n: int, seed: int, max_attempts: int = 1000) -> Channel:
    """A valid star-shaped channel with n boundary segments.

    Vertices are jittered around the unit circle with random radii and
    every edge gets a small random bulge. Beyond 12 segments the jitter,
    the spread of the radii and the bulges shrink in proportion to 1/n.
    Invalid draws are rejected.
    """
    if n < 2:
        raise ValueError(f"A channel needs at least 2 boundary segments, got {n}.")
    rng = np.random.default_rng(seed)
    m = n + 1
    s = min(1.0, 12.0 / n)
    for attempt in range(max_attempts):
        jitter = rng.uniform(-0.3 * s, 0.3 * s, size=m)
        angles = 2.0 * np.pi * (np.arange(m) + jitter) / m
        radii = rng.uniform(0.75 - 0.25 * s, 0.75 + 0.25 * s, size=m)
        bulges = rng.uniform(-0.15 * s, 0.15 * s, size=m)
        pts = [
            Point(float(r * np.cos(a)), float(r * np.sin(a)))
            for r, a in zip(radii, angles)
        ]
        sigma = ArcSegment(pts[0], pts[1], 0.0)
        ring = pts[1:] + [pts[0]]
        kappa = ArcSpline(
            tuple(
                ArcSegment(a, b, float(k))
                for a, b, k in zip(ring, ring[1:], bulges[1:])
            )
        )
        try:
            ch = validate_channel(sigma, kappa)
        except ChannelInvalid as e:
            logging.debug(f"Random channel attempt {attempt} rejected: {e.code}")
            continue
        return ch
    raise RuntimeError(f"No valid channel with {n} segments in {max_attempts} draws.")


def random_hook(seed: int) -> Fixture:
    """A hook like hk1 with random leg widths, gap and height.

    The legs are too tall for the gap between them, so the bottom of the
    far leg stays blocked.
    """
    rng = np.random.default_rng(seed)
    w1, w2 = (float(w) for w in rng.uniform(0.8, 1.2, size=2))
    gap = float(rng.uniform(2.0, 3.0))
    height = float(rng.uniform(6.0, 8.0))
    top = height + float(rng.uniform(0.8, 1.2))
    x2, x3 = w1 + gap, w1 + gap + w2
    sigma = ArcSegment(Point(0.0, 0.0), Point(w1, 0.0))
    corners = [
        (w1, 0.0),
        (w1, height),
        (x2, height),
        (x2, 0.0),
        (x3, 0.0),
        (x3, top),
        (0.0, top),
        (0.0, 0.0),
    ]
    return Fixture(
        f"hook{seed}",
        validate_channel(sigma, _path(corners, [0.0] * 7)),
        visible=(Point(0.5 * w1, 0.5 * height),),
        blocked=(Point(x2 + 0.5 * w2, 0.5),),
    )


def random_interior_point(ch: Channel, rng: np.random.Generator) -> Point:
    """A point strictly inside the channel, by rejection from its box."""
    pts = ch.sample_points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    margin = 1e-3 * ch.diameter
    while True:
        x, y = rng.uniform(lo, hi)
        q = Point(float(x), float(y))
        if point_in_channel(ch, q) is not Location.INTERIOR:
            continue
        if min(s.distance_to(q) for s in ch.segments()) > margin:
            return q


def scale_bulges(ch: Channel, factor: float) -> Channel:
    """The channel with every bulge multiplied by factor."""
    sigma = ArcSegment(ch.sigma.start, ch.sigma.end, ch.sigma.bulge * factor)
    kappa = ArcSpline(
        tuple(ArcSegment(s.start, s.end, s.bulge * factor) for s in ch.kappa)
    )
    return validate_channel(sigma, kappa, ch.base_tol)
