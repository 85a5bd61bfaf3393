"""Tests for delta.py."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circular_visibility.delta import (
    EventCause,
    SegmentKind,
    build_profile,
    classify_segment,
    contacts,
    delta,
    delta_sign,
    penetration,
    segment_events,
    starting_restriction,
)
from circular_visibility.fixtures import random_channel, random_interior_point, sq1
from circular_visibility.geometry import OverlapError, arc_with_tangent
from circular_visibility.oracle import OracleConfig, sample_connecting_arcs
from circular_visibility.order import (
    connecting_arc,
    leaves_sigma_left,
    max_connecting_arc,
    min_connecting_arc,
)
from circular_visibility.structs import ArcSegment, Direction, Point, Side

_P = Point(0.5, 0.5)


def _path(*points):
    pts = [Point(x, y) for x, y in points]
    return [ArcSegment(a, b) for a, b in zip(pts, pts[1:])]


def test_event_cause():
    """Tests for EventCause()."""
    assert EventCause.APPROACH_RIGHT.contribution == 1
    assert EventCause.APPROACH_LEFT.contribution == -1
    assert EventCause.LEAVE_LEFT.contribution == 1
    assert EventCause.LEAVE_RIGHT.contribution == -1
    assert EventCause.approach(Side.LEFT) is EventCause.APPROACH_LEFT
    assert EventCause.leave(Side.RIGHT) is EventCause.LEAVE_RIGHT
    assert EventCause.APPROACH_LEFT.is_approach
    assert not EventCause.LEAVE_LEFT.is_approach
    assert delta_sign(Side.RIGHT) == 1
    assert delta_sign(Side.LEFT) == -1


def test_delta():
    """Tests for delta()."""
    gamma = ArcSegment(Point(0.0, 0.0), Point(4.0, 0.0))
    # Crossing from right to left approaches from the right and leaves left.
    assert delta(gamma, _path((1, -1), (1, 1))) == 2
    assert delta(gamma, _path((1, -1), (1, 1), (3, 1), (3, -1))) == 0
    # Touching at a vertex from below.
    assert delta(gamma, _path((1, -1), (2, 0), (3, -1))) == 0
    assert delta(gamma, _path((1, -1), (2, 0), (2, 1))) == 2
    # Paths starting on gamma only leave, paths ending on it only approach.
    assert delta(gamma, _path((1, 0), (1, 1))) == 1
    assert delta(gamma, _path((1, 1), (1, 0))) == -1
    assert delta(gamma, _path((5, 1), (5, -1))) == 0
    # A half circle resting on gamma from above.
    assert delta(gamma, [ArcSegment(Point(1.0, 1.0), Point(3.0, 1.0), 1.0)]) == 0


def test_contacts():
    """Tests for contacts()."""
    gamma = ArcSegment(Point(0.0, 0.0), Point(4.0, 0.0))
    crossing = contacts(gamma, ArcSegment(Point(1.0, -1.0), Point(1.0, 1.0)))
    assert [t for t, _ in crossing] == pytest.approx([0.25, 0.25])
    assert {s for _, s in crossing} == {Side.LEFT, Side.RIGHT}
    # A bowl resting on gamma from above.
    bowl = ArcSegment(Point(1.0, 1.0), Point(3.0, 1.0), 1.0)
    touch = contacts(gamma, bowl)
    assert [s for _, s in touch] == [Side.LEFT, Side.LEFT]
    assert touch[0][0] == pytest.approx(0.5, abs=1e-6)
    assert contacts(gamma, ArcSegment(Point(0.0, 2.0), Point(4.0, 2.0))) == []


def test_penetration():
    """Tests for penetration()."""
    gamma = ArcSegment(Point(0.0, 0.0), Point(4.0, 0.0))
    below = ArcSegment(Point(1.0, 0.0), Point(3.0, 0.0), 1.0)
    assert penetration(gamma, below) == pytest.approx(1.0, abs=1e-9)
    flat = ArcSegment(Point(1.0, 0.5), Point(3.0, 0.5))
    assert penetration(gamma, flat) == pytest.approx(0.5)


def test_profile_of_least_arc():
    """Tests for build_profile() and classify_segment() on the least arc of
    the unit square."""
    ch = sq1().channel
    gamma = min_connecting_arc(ch, _P)
    profile = build_profile(gamma, ch)
    causes = [(e.T, e.segment, e.cause) for e in profile.events]
    assert causes == [
        (2.0, 2, EventCause.APPROACH_LEFT),
        (2.0, 3, EventCause.LEAVE_RIGHT),
        (3.0, 3, EventCause.APPROACH_RIGHT),
    ]
    assert profile.total() == -1
    assert [profile.entry(j) for j in (1, 2, 3)] == [0, 0, -1]
    assert profile.prefix(2.0) == -1
    assert profile.prefix(2.5) == -2
    assert profile.prefix(3.0) == -1
    assert len(profile.to_json()) == 3

    d_tol = ch.default_d_tol()
    assert classify_segment(profile, 1, d_tol).kind is SegmentKind.NEUTRAL
    assert classify_segment(profile, 2, d_tol).kind is SegmentKind.NEUTRAL
    left_wall = classify_segment(profile, 3, d_tol)
    assert left_wall.kind is SegmentKind.VIOLATION_LEFT
    assert left_wall.left_clearance == pytest.approx(0.5, abs=1e-6)
    assert left_wall.witness.dist(Point(0.0, 0.5)) < 1e-3
    ends = left_wall.restrictions_on(Side.LEFT)
    assert [q.point for q in ends] == [Point(0.0, 0.0), Point(0.0, 1.0)]
    assert [q.T for q in ends] == [3.0, 2.0]

    # Deep enough tolerance turns the violation into a restriction.
    assert classify_segment(profile, 3, 1.0).kind is SegmentKind.RESTRICTION_LEFT

    assert starting_restriction(gamma, ch) is Side.RIGHT


def test_profile_of_greatest_arc():
    """Tests for build_profile() and classify_segment() on the greatest arc
    of the unit square."""
    ch = sq1().channel
    gamma = max_connecting_arc(ch, _P)
    profile = build_profile(gamma, ch)
    causes = [(e.T, e.cause) for e in profile.events]
    assert causes == [
        (0.0, EventCause.APPROACH_RIGHT),
        (0.0, EventCause.LEAVE_LEFT),
        (1.0, EventCause.APPROACH_LEFT),
        (1.0, EventCause.LEAVE_RIGHT),
    ]
    assert profile.total() == 0
    assert [profile.entry(j) for j in (1, 2, 3)] == [0, 1, 0]
    d_tol = ch.default_d_tol()
    right_wall = classify_segment(profile, 1, d_tol)
    assert right_wall.kind is SegmentKind.VIOLATION_RIGHT
    assert right_wall.right_clearance == pytest.approx(0.5, abs=1e-6)
    top = classify_segment(profile, 2, d_tol)
    assert top.kind is SegmentKind.RESTRICTION_RIGHT
    assert top.witness.dist(Point(1.0, 1.0)) < 1e-9
    assert classify_segment(profile, 3, d_tol).kind is SegmentKind.NEUTRAL
    assert starting_restriction(gamma, ch) is Side.LEFT


def test_segment_events():
    """Tests for segment_events()."""
    ch = sq1().channel
    gamma = max_connecting_arc(ch, _P)
    first = segment_events(gamma.arc, ch, 1)
    assert [e.contribution for e in first] == [1, 1, -1]
    assert segment_events(gamma.arc, ch, 3) == []


def test_starting_restriction():
    """Tests for starting_restriction()."""
    ch = sq1().channel
    straight = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), _P))
    assert starting_restriction(straight, ch) is None
    # A half circle leaving sigma tangentially keeps sigma on its right.
    tangent = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), _P, 1.0))
    assert starting_restriction(tangent, ch) is Side.LEFT


@given(st.floats(0.01, 0.99), st.floats(0.05, math.pi - 0.05))
@settings(deadline=None, max_examples=50)
def test_total_count_of_connecting_arcs(t, angle):
    """Tests that the count of the whole boundary of the unit square is 0
    for connecting arcs that do not start at sigma(0)."""
    ch = sq1().channel
    start = ch.sigma.point_at(t)
    arc = arc_with_tangent(Direction(1.0, 0.0).rotated(angle), start, _P)
    profile = build_profile(connecting_arc(ch.sigma, arc, ch.tol), ch)
    assert profile.total() == 0
    assert sum(e.contribution for e in profile.events) == 0
    for e in profile.events:
        # Values at boundary points on the arc are odd.
        assert profile.prefix(e.T) % 2 == 1


@pytest.mark.parametrize("n, seed", [(8, 0), (9, 1), (10, 2), (11, 3), (12, 4)])
def test_total_count_on_random_channels(n, seed):
    """Tests that the count is -1 for arcs starting at sigma(0) and 0 for
    every other connecting arc that stays left of sigma."""
    ch = random_channel(n, seed)
    p = random_interior_point(ch, np.random.default_rng(seed))
    checked = 0
    for gamma in sample_connecting_arcs(ch, p, OracleConfig(4, 6, 8)):
        if not leaves_sigma_left(gamma.arc, ch):
            continue
        try:
            profile = build_profile(gamma, ch)
        except OverlapError:
            continue
        assert profile.total() == (-1 if gamma.t_sigma == 0.0 else 0)
        assert profile.entry(1) == 0
        checked += 1
    assert checked > 0
