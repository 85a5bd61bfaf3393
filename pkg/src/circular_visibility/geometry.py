"""Arc primitives: construction, side predicates, intersections and the
Apollonius solves used to build update arcs.

Everything here works on the bulge form of ArcSegment and on the
generalized-circle Support, so near-straight arcs never go through a
far-away center.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from circular_visibility.structs import (
    DEFAULT_TOLERANCES,
    ArcSegment,
    CutEvent,
    CutKind,
    Direction,
    Point,
    Side,
    SideClass,
    Support,
    Tolerances,
)

# Relative residual accepted for Apollonius solutions.
_RESIDUAL_TOL = 1e-8


class GeometryError(Exception):
    """Base class for failures of the geometric kernel."""


class DegenerateThroughArc(GeometryError):
    """Raised when no arc runs from p through r to q."""


class DegenerateTangentArc(GeometryError):
    """Raised when no arc from p to q has the requested tangent."""


class OverlapError(GeometryError):
    """Raised when two curves share a piece of positive length."""


class IllConditioned(GeometryError):
    """Raised when a construction is singular within tolerance."""


class CoincidentSupports(GeometryError):
    """Raised when two supports are the same circle or line."""


class TangentAt(enum.Enum):
    """Which endpoint a prescribed tangent belongs to."""

    START = "start"
    END = "end"


@dataclass(frozen=True)
class TangentTo:
    """Constraint: the solution is tangent to this circle or line."""

    support: Support


@dataclass(frozen=True)
class Through:
    """Constraint: the solution passes through this point."""

    point: Point


SupportConstraint = Union[TangentTo, Through]


def side_of(
    arc: ArcSegment | Support, p: Point, tol: Tolerances = DEFAULT_TOLERANCES
) -> SideClass:
    """Classify p against the circle or line carrying arc."""
    delta = arc.signed_distance(p)
    if delta > tol.eps_geom:
        return SideClass.STRICT_LEFT
    if delta < -tol.eps_geom:
        return SideClass.STRICT_RIGHT
    return SideClass.ON


def tangent_and_normal(arc: ArcSegment, t: float) -> tuple[Direction, Direction]:
    """Unit tangent and left unit normal at parameter t."""
    tangent = arc.tangent_at(t)
    return tangent, tangent.left_normal()


def arc_through(
    p: Point, r: Point, q: Point, tol: Tolerances = DEFAULT_TOLERANCES
) -> ArcSegment:
    """The arc from p to q passing through r."""
    a = p - r
    b = q - r
    na, nb = a.norm(), b.norm()
    if min(na, nb, p.dist(q)) <= tol.eps_geom:
        raise DegenerateThroughArc(f"Points {p}, {r}, {q} are not distinct.")
    cross = a.cross(b)
    dot = a.dot(b)
    if abs(cross) <= tol.eps_angle * na * nb and dot > 0:
        raise DegenerateThroughArc(f"{r} is not between {p} and {q}.")
    # Half the sweep equals pi minus the inscribed angle at r.
    beta = math.atan2(abs(cross), -dot)
    bulge = math.tan(0.5 * beta)
    if (q - p).cross(r - p) > 0:
        bulge = -bulge
    return ArcSegment(p, q, bulge)


def arc_with_tangent(
    tau: Direction,
    p: Point,
    q: Point,
    tangent_at: TangentAt = TangentAt.START,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ArcSegment:
    """The arc from p to q whose tangent at the given end is tau."""
    if p.dist(q) <= tol.eps_geom:
        raise DegenerateTangentArc(f"Endpoints {p} and {q} coincide.")
    chord = Direction.of(q - p)
    if tangent_at is TangentAt.START:
        psi = math.atan2(tau.cross(chord), tau.dot(chord))
    else:
        psi = math.atan2(chord.cross(tau), chord.dot(tau))
    if abs(psi) > math.pi - tol.eps_angle:
        raise DegenerateTangentArc(f"Tangent {tau} points back along the chord.")
    return ArcSegment(p, q, math.tan(0.5 * psi))


def arc_on_support(
    support: Support, start: Point, end: Point, tol: Tolerances = DEFAULT_TOLERANCES
) -> ArcSegment:
    """The piece of support from start to end, in the support's orientation."""
    return arc_with_tangent(support.tangent_at(start), start, end, TangentAt.START, tol)


def branch_side(
    support: Support,
    x: Point,
    u: Direction,
    k_branch: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Side:
    """Side of support on which a curve leaving x along u lies, locally.

    The curve has signed curvature k_branch. Tangential departures are
    decided by comparing curvatures.
    """
    g = support.gradient(x)
    first = Direction.of(g).dot(u) if g.norm() > 0 else 0.0
    if abs(first) > tol.eps_angle:
        return Side.LEFT if first > 0 else Side.RIGHT
    sgn = 1.0 if support.tangent_at(x).dot(u) > 0 else -1.0
    second = sgn * k_branch - support.curvature
    scale = max(abs(k_branch), abs(support.curvature))
    if abs(second) <= 1e-12 * scale or second == 0.0:
        raise OverlapError(f"Curve leaves {x} along the support.")
    return Side.LEFT if second > 0 else Side.RIGHT


def intersect_supports(
    a: Support, b: Support, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[tuple[Point, bool]]:
    """Common points of two circles or lines, flagged when tangential.

    Raises CoincidentSupports when the supports coincide.
    """
    if a.is_line and b.is_line:
        return _intersect_lines(a, b, tol)
    ka, kb = a.curvature, b.curvature
    na, nb = a.normal.as_point(), b.normal.as_point()
    # Gradient of the radical function kb * fa - ka * fb.
    g = na * kb - nb * ka + (a.anchor - b.anchor) * (ka * kb)
    gn = g.norm()
    if ka != 0.0 and kb != 0.0 and gn / abs(ka * kb) <= tol.eps_geom:
        # Concentric.
        if abs(a.radius - b.radius) <= tol.eps_geom:
            raise CoincidentSupports
        return []
    radical_at_a = -ka * b.value(a.anchor)
    q0 = a.anchor - g * (radical_at_a / (gn * gn))
    d = Direction(-g.y / gn, g.x / gn)
    quad, other = (a, b) if abs(ka) >= abs(kb) else (b, a)
    k = quad.curvature
    f0 = quad.value(q0)
    slope = quad.gradient(q0).dot(d)
    disc = slope * slope + 2.0 * k * f0

    # Closest approach of the two supports along the radical line.
    vertex = q0 + d.as_point() * (slope / k)
    on_quad = quad.project(vertex)
    on_other = other.project(on_quad)
    window = tol.eps_geom * max(1.0, min(a.radius, b.radius))
    if on_quad.dist(on_other) <= window:
        return [((on_quad + on_other) * 0.5, True)]
    if disc < 0:
        return []
    root = math.sqrt(disc)
    den = slope + root if slope >= 0 else slope - root
    if den == 0.0:
        return [(q0, True)]
    s1 = den / k
    s2 = -2.0 * f0 / den
    return [(q0 + d.as_point() * s, False) for s in (s1, s2)]


def _intersect_lines(
    a: Support, b: Support, tol: Tolerances
) -> list[tuple[Point, bool]]:
    cross = a.tangent.cross(b.tangent)
    if abs(cross) <= tol.eps_angle:
        if abs(b.signed_distance(a.anchor)) <= tol.eps_geom:
            raise CoincidentSupports
        return []
    s = -b.normal.dot(a.anchor - b.anchor) / b.normal.dot(a.tangent)
    return [(a.anchor + a.tangent.as_point() * s, False)]


def intersect(
    a: ArcSegment, b: ArcSegment, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[CutEvent]:
    """All points where a meets b, classified from a's point of view.

    Events are sorted by the parameter on a. A crossing where a moves
    to the left of b is a cut from the right.
    """
    try:
        points = intersect_supports(a.support, b.support, tol)
    except CoincidentSupports:
        _check_same_support_overlap(a, b, tol)
        return []
    events: list[CutEvent] = []
    for x, touch in points:
        ta = _param_in_range(a, x, tol)
        tb = _param_in_range(b, x, tol)
        if ta is None or tb is None:
            continue
        events.append(CutEvent(ta, tb, _cut_kind(a, b, ta, tb, touch, tol), x))
    events.sort(key=lambda e: e.t_self)
    return events


def _param_in_range(arc: ArcSegment, x: Point, tol: Tolerances) -> float | None:
    t = arc.param_of(x)
    slack = tol.eps_geom / arc.length
    if t < -slack or t > 1.0 + slack:
        return None
    return min(1.0, max(0.0, t))


def _cut_kind(
    a: ArcSegment, b: ArcSegment, ta: float, tb: float, touch: bool, tol: Tolerances
) -> CutKind:
    ua = a.tangent_at(ta)
    s = b.normal_at(tb).dot(ua)
    if not touch and abs(s) > tol.eps_angle:
        return CutKind.CROSS_FROM_RIGHT if s > 0 else CutKind.CROSS_FROM_LEFT
    sgn = 1.0 if ua.dot(b.tangent_at(tb)) > 0 else -1.0
    val = sgn * a.curvature - b.curvature
    if abs(val) > 1e-12 * max(abs(a.curvature), abs(b.curvature)) and val != 0:
        return CutKind.TOUCH_LEFT if val > 0 else CutKind.TOUCH_RIGHT
    # Same curvature at a tangency: look at a nearby point of a.
    nearby = a.point_at(0.75 if ta < 0.5 else 0.25)
    side = side_of(b.support, nearby, tol)
    if side is SideClass.ON:
        raise OverlapError(f"{a} and {b} run along each other.")
    return CutKind.TOUCH_LEFT if side is SideClass.STRICT_LEFT else CutKind.TOUCH_RIGHT


def _check_same_support_overlap(a: ArcSegment, b: ArcSegment, tol: Tolerances) -> None:
    """Raise OverlapError unless a and b share at most endpoints."""

    def strictly_inside(arc: ArcSegment, q: Point) -> bool:
        margin = tol.eps_geom / arc.length
        return margin < arc.param_of(q) < 1.0 - margin

    checks = [
        (b, a.start),
        (b, a.end),
        (b, a.point_at(0.5)),
        (a, b.start),
        (a, b.end),
        (a, b.point_at(0.5)),
    ]
    if any(strictly_inside(arc, q) for arc, q in checks):
        raise OverlapError(f"{a} and {b} overlap on a common support.")


# Apollonius solves. Inversion about p turns every circle through p
# into a line, so each case reduces to tangent lines of circles.


@dataclass(frozen=True)
class _Circle:
    center: Point
    radius: float


@dataclass(frozen=True)
class _Line:
    """The line <normal, y> = offset."""

    normal: Direction
    offset: float


def _invert_point(q: Point, p: Point, tol: Tolerances) -> Point:
    v = q - p
    n2 = v.dot(v)
    if n2 <= tol.eps_geom**2:
        raise IllConditioned(f"Constraint point {q} coincides with {p}.")
    return v / n2


def _invert_support(s: Support, p: Point, tol: Tolerances) -> _Circle | _Line:
    if s.is_line:
        e = s.normal.dot(s.anchor - p)
        if abs(e) <= tol.eps_geom:
            return _Line(s.normal, 0.0)
        return _Circle(s.normal.as_point() / (2.0 * e), 1.0 / (2.0 * abs(e)))
    cp = s.center - p
    power = cp.dot(cp) - s.radius**2
    if abs(s.signed_distance(p)) <= tol.eps_geom:
        return _Line(Direction.of(cp), 0.5 / cp.norm())
    return _Circle(cp / power, s.radius / abs(power))


def _revert_line(line: _Line, p: Point, tol: Tolerances) -> Support:
    m, c = line.normal, line.offset
    if abs(c) <= tol.eps_geom:
        return Support(p, Direction(m.dy, -m.dx), 0.0)
    center = p + m.as_point() / (2.0 * c)
    radius = 1.0 / (2.0 * abs(c))
    inward = Direction.of(center - p)
    # Counterclockwise: the left normal at p points to the center.
    return Support(p, Direction(inward.dy, -inward.dx), 1.0 / radius)


def _lines_through(q: Point, shape: _Circle | _Line) -> list[_Line]:
    if isinstance(shape, _Line):
        c = shape.normal.dot(q)
        if abs(c - shape.offset) <= 1e-12 * max(1.0, abs(c)):
            return []
        return [_Line(shape.normal, c)]
    v = q - shape.center
    d = v.norm()
    rel = (d - shape.radius) / shape.radius
    if rel < -_RESIDUAL_TOL:
        return []
    if abs(rel) <= _RESIDUAL_TOL:
        m = Direction.of(v)
        return [_Line(m, m.dot(q))]
    alpha = math.acos(shape.radius / d)
    base = Direction.of(v)
    lines = []
    for sign in (1.0, -1.0):
        m = base.rotated(sign * alpha)
        lines.append(_Line(m, m.dot(shape.center) + shape.radius))
    return lines


def _common_tangents(s1: _Circle | _Line, s2: _Circle | _Line) -> list[_Line]:
    if isinstance(s1, _Line) and isinstance(s2, _Line):
        return []
    if isinstance(s1, _Line) or isinstance(s2, _Line):
        line, circle = (s1, s2) if isinstance(s1, _Line) else (s2, s1)
        assert isinstance(line, _Line) and isinstance(circle, _Circle)
        m = line.normal
        base = m.dot(circle.center)
        return [_Line(m, base + circle.radius), _Line(m, base - circle.radius)]
    w = s1.center - s2.center
    d = w.norm()
    if d <= _RESIDUAL_TOL * max(s1.radius, s2.radius):
        return []
    axis = Direction.of(w)
    lines: list[_Line] = []
    for e2 in (1.0, -1.0):
        ratio = (s1.radius - e2 * s2.radius) / d
        if abs(ratio) > 1.0 + _RESIDUAL_TOL:
            continue
        alpha = math.acos(max(-1.0, min(1.0, ratio)))
        signs = (1.0,) if alpha <= _RESIDUAL_TOL else (1.0, -1.0)
        for sign in signs:
            m = axis.rotated(sign * alpha)
            lines.append(_Line(m, m.dot(s1.center) - s1.radius))
    return lines


def _tangency_residual(s: Support, other: Support) -> float:
    """How far two supports are from touching."""
    if s.is_line and other.is_line:
        return abs(s.tangent.cross(other.tangent))
    if s.is_line or other.is_line:
        line, circle = (s, other) if s.is_line else (other, s)
        return abs(abs(line.signed_distance(circle.center)) - circle.radius)
    d = s.center.dist(other.center)
    return min(
        abs(d - (s.radius + other.radius)), abs(d - abs(s.radius - other.radius))
    )


def _residual(s: Support, constraint: SupportConstraint) -> float:
    if isinstance(constraint, Through):
        return abs(s.signed_distance(constraint.point))
    return _tangency_residual(s, constraint.support)


def apollonius_arcs(
    p: Point,
    sup_a: SupportConstraint,
    sup_b: SupportConstraint,
    cap: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[Support]:
    """All circles and lines through p meeting both constraints.

    Circles are counterclockwise and anchored at p; circles with radius
    above cap are dropped. The result is sorted by radius, lines last.
    """
    if isinstance(sup_a, Through) and isinstance(sup_b, Through):
        qa = _invert_point(sup_a.point, p, tol)
        qb = _invert_point(sup_b.point, p, tol)
        if qa.dist(qb) <= _RESIDUAL_TOL * max(qa.norm(), qb.norm()):
            raise IllConditioned("Both constraints name the same point.")
        m = Direction.of(qb - qa).left_normal()
        candidates = [_Line(m, m.dot(qa))]
    elif isinstance(sup_a, Through) or isinstance(sup_b, Through):
        if isinstance(sup_a, Through):
            through, tangent = sup_a, sup_b
        else:
            through, tangent = sup_b, sup_a
        assert isinstance(through, Through) and isinstance(tangent, TangentTo)
        q = _invert_point(through.point, p, tol)
        candidates = _lines_through(q, _invert_support(tangent.support, p, tol))
    else:
        assert isinstance(sup_a, TangentTo) and isinstance(sup_b, TangentTo)
        candidates = _common_tangents(
            _invert_support(sup_a.support, p, tol),
            _invert_support(sup_b.support, p, tol),
        )
    solutions: list[Support] = []
    for line in candidates:
        s = _revert_line(line, p, tol)
        if not s.is_line and s.radius > cap:
            continue
        scale = 1.0 if s.is_line else max(1.0, s.radius)
        if max(_residual(s, sup_a), _residual(s, sup_b)) > _RESIDUAL_TOL * scale:
            continue
        if any(_same_support(s, t, tol) for t in solutions):
            continue
        solutions.append(s)
    solutions.sort(key=lambda s: s.radius)
    return solutions


def _same_support(s: Support, t: Support, tol: Tolerances) -> bool:
    if s.is_line != t.is_line:
        return False
    if s.is_line:
        return abs(s.tangent.cross(t.tangent)) <= tol.eps_angle
    return (
        s.center.dist(t.center) <= tol.eps_geom
        and abs(s.radius - t.radius) <= tol.eps_geom
    )
