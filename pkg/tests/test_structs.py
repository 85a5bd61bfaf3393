"""Tests for structs.py."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circular_visibility.structs import (
    ArcSegment,
    Direction,
    Point,
    Side,
    SideClass,
    Support,
    Tolerances,
)


@st.composite
def arc_segments(draw, max_bulge=3.0):
    """Arcs with well separated endpoints and a bounded bulge."""
    x = draw(st.floats(-10, 10))
    y = draw(st.floats(-10, 10))
    angle = draw(st.floats(0, 2 * math.pi))
    length = draw(st.floats(0.1, 10))
    bulge = draw(st.floats(-max_bulge, max_bulge))
    start = Point(x, y)
    end = start + Direction.from_angle(angle).as_point() * length
    return ArcSegment(start, end, bulge)


def test_point():
    """Tests for Point()."""
    p, q = Point(1.0, 2.0), Point(4.0, 6.0)
    assert p + q == Point(5.0, 8.0)
    assert q - p == Point(3.0, 4.0)
    assert (q - p).norm() == pytest.approx(5.0)
    assert p.dist(q) == pytest.approx(5.0)
    assert p.cross(q) == pytest.approx(1.0 * 6.0 - 2.0 * 4.0)
    assert Point.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        Point(math.nan, 0.0)
    with pytest.raises(ValueError):
        Point.from_json([1.0, 2.0, 3.0])


def test_direction():
    """Tests for Direction()."""
    d = Direction.of(Point(0.0, 2.0))
    assert d == Direction(0.0, 1.0)
    assert d.left_normal().dx == pytest.approx(-1.0)
    r = Direction(1.0, 0.0).rotated(math.pi / 2)
    assert r.dx == pytest.approx(0.0, abs=1e-12)
    assert r.dy == pytest.approx(1.0)
    with pytest.raises(ValueError):
        Direction(1.0, 1.0)
    with pytest.raises(ValueError):
        Direction.of(Point(0.0, 0.0))


def test_tolerances():
    """Tests for Tolerances()."""
    tol = Tolerances()
    assert tol.scaled(10.0).eps_geom == pytest.approx(1e-8)
    assert tol.scaled(10.0).eps_angle == tol.eps_angle
    with pytest.raises(ValueError):
        Tolerances(eps_geom=0.0)


def test_side_enums():
    """Tests for Side() and SideClass()."""
    assert Side.LEFT.opposite() is Side.RIGHT
    assert Side.LEFT.sign == 1
    assert Side.RIGHT.sign == -1
    assert SideClass.STRICT_LEFT.flipped() is SideClass.STRICT_RIGHT
    assert SideClass.ON.flipped() is SideClass.ON


def test_support():
    """Tests for Support()."""
    # Unit circle, counterclockwise, anchored at its bottom.
    circle = Support(Point(0.0, -1.0), Direction(1.0, 0.0), 1.0)
    assert circle.center.dist(Point(0.0, 0.0)) < 1e-12
    assert circle.radius == pytest.approx(1.0)
    assert circle.signed_distance(Point(0.0, 0.0)) == pytest.approx(1.0)
    assert circle.signed_distance(Point(3.0, 0.0)) == pytest.approx(-2.0)
    foot = circle.project(Point(2.0, 0.0))
    assert foot.dist(Point(1.0, 0.0)) < 1e-12
    line = Support(Point(0.0, 0.0), Direction(1.0, 0.0), 0.0)
    assert line.is_line
    assert line.signed_distance(Point(5.0, -2.0)) == pytest.approx(-2.0)
    assert math.isinf(line.radius)
    with pytest.raises(ValueError):
        _ = line.center


def test_arc_segment():
    """Tests for ArcSegment()."""
    # Lower half of the unit circle, counterclockwise.
    arc = ArcSegment(Point(-1.0, 0.0), Point(1.0, 0.0), 1.0)
    assert arc.sweep == pytest.approx(math.pi)
    assert arc.length == pytest.approx(math.pi)
    assert arc.radius == pytest.approx(1.0)
    assert arc.center.dist(Point(0.0, 0.0)) < 1e-12
    assert arc.point_at(0.5).dist(Point(0.0, -1.0)) < 1e-12
    assert arc.tangent_at(0.5).dx == pytest.approx(1.0)
    assert arc.param_of(Point(0.0, -1.0)) == pytest.approx(0.5)
    assert arc.distance_to(Point(0.0, 0.0)) == pytest.approx(1.0)
    assert arc.distance_to(Point(3.0, 0.0)) == pytest.approx(2.0)
    # Inside the circle is left of a counterclockwise arc.
    assert arc.signed_distance(Point(0.0, -0.5)) == pytest.approx(0.5)

    line = ArcSegment(Point(0.0, 0.0), Point(2.0, 0.0))
    assert line.is_line()
    assert line.length == pytest.approx(2.0)
    assert line.point_at(0.25) == Point(0.5, 0.0)
    assert line.distance_to(Point(3.0, 0.0)) == pytest.approx(1.0)

    assert ArcSegment.from_json(arc.to_json()) == arc
    with pytest.raises(ValueError):
        ArcSegment(Point(0.0, 0.0), Point(0.0, 0.0))
    with pytest.raises(ValueError):
        ArcSegment.from_json({"start": [0.0, 0.0]})


@given(arc_segments(), st.floats(0.01, 0.99))
@settings(deadline=None)
def test_arc_segment_parameters(arc, t):
    """Tests for ArcSegment.point_at(), param_of(), reversed() and
    sub_arc()."""
    q = arc.point_at(t)
    assert arc.param_of(q) == pytest.approx(t, abs=1e-6)
    assert arc.distance_to(q) <= 1e-7 * max(1.0, arc.length)
    assert arc.reversed().point_at(1.0 - t).dist(q) <= 1e-7 * max(1.0, arc.length)
    piece = arc.sub_arc(0.0, t)
    assert piece.end.dist(q) <= 1e-7 * max(1.0, arc.length)
    assert piece.length == pytest.approx(t * arc.length, rel=1e-6)
