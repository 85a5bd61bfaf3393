"""Tests for order.py."""

import functools
import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circular_visibility.fixtures import hk1, sq1
from circular_visibility.oracle import OracleConfig, sample_connecting_arcs
from circular_visibility.order import (
    BoundaryCase,
    DecidingCase,
    MixedQuery,
    Relation,
    compare,
    connecting_arc,
    connecting_arcs_on,
    extremal_connecting_arc,
    fitted_arcs,
    leaves_sigma_left,
    max_connecting_arc,
    min_connecting_arc,
)
from circular_visibility.structs import ArcSegment, Direction, Point, Support

_P = Point(0.5, 0.5)


def test_connecting_arc():
    """Tests for connecting_arc()."""
    sigma = sq1().channel.sigma
    straight = connecting_arc(sigma, ArcSegment(Point(0.5, 0.0), _P))
    assert straight.boundary_case is BoundaryCase.INTERIOR_START
    assert straight.t_sigma == pytest.approx(0.5)
    assert straight.start == Point(0.5, 0.0)
    assert straight.end == _P
    corner = connecting_arc(sigma, ArcSegment(Point(0.0, 0.0), _P))
    assert corner.boundary_case is BoundaryCase.START_AT_SIGMA0
    assert corner.t_sigma == 0.0
    far = connecting_arc(sigma, ArcSegment(Point(1.0, 0.0), _P))
    assert far.boundary_case is BoundaryCase.START_AT_SIGMA1
    assert far.t_sigma == 1.0
    assert far.to_json()["t_sigma"] == 1.0


def test_extremal_connecting_arcs():
    """Tests for min_connecting_arc() and max_connecting_arc()."""
    ch = sq1().channel
    least = min_connecting_arc(ch, _P)
    assert least.start == Point(0.0, 0.0)
    assert least.boundary_case is BoundaryCase.CLOSURE_EXTREMAL
    assert least.arc.center.dist(Point(0.0, 0.5)) < 1e-9
    assert least.arc.radius == pytest.approx(0.5)
    assert least.arc.sweep == pytest.approx(-1.5 * math.pi)

    greatest = max_connecting_arc(ch, _P)
    assert greatest.start == Point(1.0, 0.0)
    assert greatest.boundary_case is BoundaryCase.CLOSURE_EXTREMAL
    assert greatest.arc.center.dist(Point(1.0, 0.5)) < 1e-9
    assert greatest.arc.sweep == pytest.approx(1.5 * math.pi)

    # Straight back along sigma's line has no tangent arc; the radius is capped.
    capped = max_connecting_arc(ch, Point(-1.0, 0.0), cap=10.0)
    assert capped.start == Point(1.0, 0.0)
    assert capped.arc.radius == pytest.approx(10.0)
    assert capped.arc.tangent_at(0.0).dy > 0


def test_extremal_arcs_right_of_sigma():
    """Tests for extremal_connecting_arc() when p is inside sigma's circle."""
    sigma = ArcSegment(Point(0.0, 0.0), Point(2.0, 0.0), -0.5)
    p = Point(1.0, 0.3)
    least = extremal_connecting_arc(sigma, p, cap=100.0, largest=False)
    assert least.start == sigma.end
    assert least.arc.distance_to(sigma.start) < 1e-9
    greatest = extremal_connecting_arc(sigma, p, cap=100.0, largest=True)
    assert greatest.start == sigma.start
    assert greatest.arc.distance_to(sigma.end) < 1e-9


def test_compare():
    """Tests for compare()."""
    ch = sq1().channel
    least, greatest = min_connecting_arc(ch, _P), max_connecting_arc(ch, _P)
    straight = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), _P))

    result = compare(least, greatest)
    assert result.relation is Relation.LESS
    assert result.deciding_case is DecidingCase.START_ORDER_NO_LEFT_CUT
    assert compare(greatest, least).relation is Relation.GREATER
    assert compare(least, straight).relation is Relation.LESS
    assert compare(straight, greatest).relation is Relation.LESS
    same = compare(least, least)
    assert same.relation is Relation.EQUAL
    assert same.deciding_case is DecidingCase.SAME_START_TANGENT_DOT

    # Same start: the arc turning further back is smaller.
    steep = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), _P, -0.2))
    shallow = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), _P, 0.2))
    assert compare(steep, shallow).relation is Relation.LESS

    other = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), Point(0.5, 0.9)))
    with pytest.raises(MixedQuery):
        compare(straight, other)


def test_compare_against_samples():
    """Tests compare() and extremality on a grid of connecting arcs."""
    ch = sq1().channel
    cfg = OracleConfig(start_samples=4, angle_samples=6, arc_samples=8)
    arcs = list(sample_connecting_arcs(ch, _P, cfg))
    assert len(arcs) == 5 * 6
    least, greatest = min_connecting_arc(ch, _P), max_connecting_arc(ch, _P)
    for g in arcs:
        assert compare(least, g).relation is not Relation.GREATER
        assert compare(g, greatest).relation is not Relation.GREATER
    for g1, g2 in itertools.combinations(arcs, 2):
        forward, backward = compare(g1, g2), compare(g2, g1)
        assert forward.relation is backward.relation.flipped()


def test_tangent_start_is_greatest():
    """Tests that an arc leaving sigma tangentially is greater than every
    arc starting no later."""
    ch = sq1().channel
    tangent = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), _P, 1.0))
    assert tangent.boundary_case is BoundaryCase.INTERIOR_START
    cfg = OracleConfig(start_samples=4, angle_samples=6, arc_samples=8)
    for g in sample_connecting_arcs(ch, _P, cfg):
        if g.t_sigma <= 0.5:
            assert compare(g, tangent).relation is Relation.LESS


def test_extremal_arc_within_cap():
    """Tests that a long extremal arc of moderate radius is not capped."""
    fixture = hk1()
    ch = fixture.channel
    [p] = fixture.blocked
    least = min_connecting_arc(ch, p)
    assert least.start == Point(0.0, 0.0)
    assert least.arc.radius == pytest.approx(20.5)
    assert least.arc.center.dist(Point(0.0, 20.5)) < 1e-9
    assert least.arc.length > ch.cap()
    straight = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), p))
    assert compare(least, straight).relation is Relation.LESS


@functools.cache
def _arc_pool():
    ch = sq1().channel
    cfg = OracleConfig(start_samples=6, angle_samples=8, arc_samples=8)
    arcs = list(sample_connecting_arcs(ch, _P, cfg))
    return [min_connecting_arc(ch, _P), *arcs, max_connecting_arc(ch, _P)]


@given(st.data())
@settings(deadline=None, max_examples=300)
def test_compare_is_transitive(data):
    """Tests that compare() is transitive on triples of connecting arcs."""
    pool = _arc_pool()
    a, b, c = (data.draw(st.sampled_from(pool)) for _ in range(3))
    ab, bc = compare(a, b).relation, compare(b, c).relation
    if ab is Relation.EQUAL or ab is not bc:
        return
    assert compare(a, c).relation is ab


def test_leaves_sigma_left():
    """Tests for leaves_sigma_left()."""
    ch = sq1().channel
    assert leaves_sigma_left(ArcSegment(Point(0.5, 0.0), _P), ch)
    assert leaves_sigma_left(ArcSegment(Point(0.5, 0.0), _P, 1.0), ch)
    assert not leaves_sigma_left(ArcSegment(Point(0.5, 0.0), Point(0.5, -0.5)), ch)


def test_connecting_arcs_on():
    """Tests for connecting_arcs_on()."""
    ch = sq1().channel
    vertical = Support(_P, Direction(0.0, 1.0), 0.0)
    [g] = connecting_arcs_on(vertical, ch, _P)
    assert g.start.dist(Point(0.5, 0.0)) < 1e-9
    assert g.arc.is_line()
    # A line parallel to sigma never reaches it.
    assert connecting_arcs_on(Support(_P, Direction(1.0, 0.0), 0.0), ch, _P) == []


def test_fitted_arcs():
    """Tests for fitted_arcs()."""
    ch = sq1().channel
    arcs = list(fitted_arcs(ch, _P, [0, 3]))
    assert arcs
    for g in arcs:
        assert g.end.dist(_P) < 1e-9
        assert ch.sigma.distance_to(g.start) < 1e-9
    # The circle touching sigma and the left side has its center on the diagonal.
    c = 1.0 - math.sqrt(0.5)
    assert any(
        not g.arc.is_line() and g.arc.center.dist(Point(c, c)) < 1e-6 for g in arcs
    )
    for g1, g2 in itertools.combinations(arcs, 2):
        assert g1.arc != g2.arc
    assert list(fitted_arcs(ch, _P, [2])) == []
