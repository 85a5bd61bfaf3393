"""Connecting arcs from the starting arc to the query point, their total
order, and the minimal and maximal connecting arcs."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from circular_visibility.channel import Channel
from circular_visibility.geometry import (
    CoincidentSupports,
    DegenerateTangentArc,
    DegenerateThroughArc,
    GeometryError,
    OverlapError,
    SupportConstraint,
    TangentAt,
    TangentTo,
    Through,
    apollonius_arcs,
    arc_through,
    arc_with_tangent,
    branch_side,
    intersect,
    intersect_supports,
    side_of,
)
from circular_visibility.structs import (
    DEFAULT_TOLERANCES,
    ArcSegment,
    CutKind,
    Point,
    Side,
    SideClass,
    Support,
    Tolerances,
)


class MixedQuery(Exception):
    """Raised when comparing arcs with different starting arcs or endpoints."""


class BoundaryCase(enum.Enum):
    """Where a connecting arc starts on the starting arc."""

    INTERIOR_START = "interior_start"
    START_AT_SIGMA0 = "start_at_sigma0"
    START_AT_SIGMA1 = "start_at_sigma1"
    CLOSURE_EXTREMAL = "closure_extremal"


class Relation(enum.Enum):
    """Outcome of a comparison."""

    LESS = -1
    EQUAL = 0
    GREATER = 1

    def flipped(self) -> Relation:
        """The relation with arguments swapped."""
        return Relation(-self.value)


class DecidingCase(enum.Enum):
    """Which rule of the order decided a comparison."""

    START_ORDER_NO_LEFT_CUT = "start_order_no_left_cut"
    START_ORDER_WITH_LEFT_CUT = "start_order_with_left_cut"
    SAME_START_TANGENT_DOT = "same_start_tangent_dot"
    EXTENDED_CUT_AT_END = "extended_cut_at_end"


@dataclass(frozen=True)
class OrderResult:
    """A relation plus the rule that produced it."""

    relation: Relation
    deciding_case: DecidingCase

    def flipped(self) -> OrderResult:
        """The result of the swapped comparison."""
        return OrderResult(self.relation.flipped(), self.deciding_case)


@dataclass(frozen=True)
class ConnectingArc:
    """An arc from a point of sigma to the query point."""

    arc: ArcSegment
    t_sigma: float
    boundary_case: BoundaryCase
    sigma: ArcSegment

    @property
    def start(self) -> Point:
        """The start point on sigma."""
        return self.arc.start

    @property
    def end(self) -> Point:
        """The query point."""
        return self.arc.end

    def to_json(self) -> dict:
        """Serialize the arc with its start parameter."""
        return {**self.arc.to_json(), "t_sigma": self.t_sigma}


def connecting_arc(
    sigma: ArcSegment, arc: ArcSegment, tol: Tolerances = DEFAULT_TOLERANCES
) -> ConnectingArc:
    """Wrap an arc starting on sigma, classifying its start."""
    t = min(1.0, max(0.0, sigma.param_of(arc.start)))
    slack = tol.eps_geom / sigma.length
    departure = sigma.normal_at(t).dot(arc.tangent_at(0.0))
    if t <= slack or t >= 1.0 - slack:
        t = 0.0 if t <= slack else 1.0
        if departure <= tol.eps_angle:
            case = BoundaryCase.CLOSURE_EXTREMAL
        elif t == 0.0:
            case = BoundaryCase.START_AT_SIGMA0
        else:
            case = BoundaryCase.START_AT_SIGMA1
    else:
        case = BoundaryCase.INTERIOR_START
    return ConnectingArc(arc, t, case, sigma)


def _has_left_cut(
    g1: ConnectingArc, g2: ConnectingArc, tol: Tolerances
) -> tuple[bool, bool]:
    """Whether g1 cuts g2 from the left, and whether only at the end.

    Assumes g1 starts before g2 on sigma.
    """
    a, b = g1.arc, g2.arc
    if b.distance_to(a.start) <= tol.eps_geom:
        return True, False
    if a.distance_to(b.start) <= tol.eps_geom:
        return True, False
    try:
        events = intersect(a, b, tol)
    except OverlapError:
        return True, False
    slack = tol.eps_geom / a.length
    for e in events:
        if slack < e.t_self < 1.0 - slack and e.kind is CutKind.CROSS_FROM_LEFT:
            return True, False
    ua, ub = a.tangent_at(1.0), b.tangent_at(1.0)
    if abs(ua.cross(ub)) <= tol.eps_angle and ua.dot(ub) > 0:
        # Common end tangent: g2 arrives from the right of [g1] when it
        # curves less.
        if b.curvature < a.curvature - 1e-12 * max(1.0, abs(a.curvature)):
            return True, True
    return False, False


def compare(
    g1: ConnectingArc, g2: ConnectingArc, tol: Tolerances = DEFAULT_TOLERANCES
) -> OrderResult:
    """Compare two connecting arcs with the same sigma and endpoint."""
    if g1.sigma != g2.sigma or g1.end.dist(g2.end) > tol.eps_geom:
        raise MixedQuery("Connecting arcs must share sigma and endpoint.")
    sigma = g1.sigma
    eps_t = tol.eps_geom / sigma.length
    if abs(g1.t_sigma - g2.t_sigma) < eps_t or g1.start.dist(g2.start) <= tol.eps_geom:
        tangent = sigma.tangent_at(0.5 * (g1.t_sigma + g2.t_sigma))
        d1 = tangent.dot(g1.arc.tangent_at(0.0))
        d2 = tangent.dot(g2.arc.tangent_at(0.0))
        if abs(d1 - d2) <= tol.eps_angle:
            # Distinct circles through two points cannot share a tangent.
            assert abs(g1.arc.bulge - g2.arc.bulge) <= 1e-6 * max(
                1.0, abs(g1.arc.bulge)
            ), f"Same start and tangent but different arcs: {g1}, {g2}"
            relation = Relation.EQUAL
        else:
            relation = Relation.LESS if d1 < d2 else Relation.GREATER
        return OrderResult(relation, DecidingCase.SAME_START_TANGENT_DOT)
    if g1.t_sigma > g2.t_sigma:
        return compare(g2, g1, tol).flipped()
    cut, at_end = _has_left_cut(g1, g2, tol)
    if not cut:
        return OrderResult(Relation.LESS, DecidingCase.START_ORDER_NO_LEFT_CUT)
    case = (
        DecidingCase.EXTENDED_CUT_AT_END
        if at_end
        else DecidingCase.START_ORDER_WITH_LEFT_CUT
    )
    return OrderResult(Relation.GREATER, case)


def _capped_arc(
    sigma: ArcSegment,
    start: Point,
    p: Point,
    cap: float,
    largest: bool,
    tol: Tolerances,
) -> ArcSegment:
    """The arc of radius cap from start to p leaving sigma most like the
    extremal arc would."""
    chord = start.dist(p)
    half = math.asin(min(1.0, chord / (2.0 * cap)))
    minor = math.tan(half / 2.0)
    major = math.tan((math.pi - half) / 2.0)
    t = min(1.0, max(0.0, sigma.param_of(start)))
    tangent, normal = sigma.tangent_at(t), sigma.normal_at(t)
    candidates = [ArcSegment(start, p, b) for b in (minor, -minor, major, -major)]
    leaving = [
        a for a in candidates if normal.dot(a.tangent_at(0.0)) >= -tol.eps_angle
    ] or candidates

    def departure(a: ArcSegment) -> float:
        return tangent.dot(a.tangent_at(0.0))

    return max(leaving, key=departure) if largest else min(leaving, key=departure)


def _extremal_arc(
    sigma: ArcSegment, p: Point, cap: float, largest: bool, tol: Tolerances
) -> ArcSegment:
    right = side_of(sigma, p, tol) is SideClass.STRICT_RIGHT
    if right:
        start, through = sigma.start, sigma.end
        if not largest:
            start, through = through, start
    else:
        start = sigma.end if largest else sigma.start
    try:
        if right:
            arc = arc_through(start, through, p, tol)
        elif largest:
            heading = sigma.tangent_at(1.0)
            arc = arc_with_tangent(heading, start, p, TangentAt.START, tol)
        else:
            heading = -sigma.tangent_at(0.0)
            arc = arc_with_tangent(heading, start, p, TangentAt.START, tol)
    except (DegenerateTangentArc, DegenerateThroughArc):
        logging.debug(f"Extremal arc to {p} does not exist; capping its radius.")
        return _capped_arc(sigma, start, p, cap, largest, tol)
    if not arc.is_line(tol) and arc.radius > cap:
        logging.debug(f"Extremal arc to {p} has radius over {cap}; capping.")
        return _capped_arc(sigma, start, p, cap, largest, tol)
    return arc


def extremal_connecting_arc(
    sigma: ArcSegment,
    p: Point,
    cap: float,
    largest: bool,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ConnectingArc:
    """The maximal (largest=True) or minimal connecting arc from sigma to p."""
    return connecting_arc(sigma, _extremal_arc(sigma, p, cap, largest, tol), tol)


def max_connecting_arc(
    ch: Channel, p: Point, cap: float | None = None
) -> ConnectingArc:
    """The greatest connecting arc of the channel's sigma to p."""
    return extremal_connecting_arc(
        ch.sigma, p, ch.cap() if cap is None else cap, True, ch.tol
    )


def min_connecting_arc(
    ch: Channel, p: Point, cap: float | None = None
) -> ConnectingArc:
    """The least connecting arc of the channel's sigma to p."""
    return extremal_connecting_arc(
        ch.sigma, p, ch.cap() if cap is None else cap, False, ch.tol
    )


def leaves_sigma_left(arc: ArcSegment, ch: Channel) -> bool:
    """Whether arc starts on sigma heading to its left and never cuts it again."""
    sigma, tol = ch.sigma, ch.tol
    try:
        side = branch_side(
            sigma.support, arc.start, arc.tangent_at(0.0), arc.curvature, tol
        )
        cuts = intersect(arc, sigma, tol)
    except OverlapError:
        return False
    if side is not Side.LEFT:
        return False
    slack = tol.eps_geom / arc.length
    sigma_slack = tol.eps_geom / sigma.length
    return not any(
        c.t_self > slack
        and sigma_slack < c.t_other < 1.0 - sigma_slack
        and c.kind in (CutKind.CROSS_FROM_LEFT, CutKind.CROSS_FROM_RIGHT)
        for c in cuts
    )


def connecting_arcs_on(support: Support, ch: Channel, p: Point) -> list[ConnectingArc]:
    """Connecting arcs to p carried by a circle or line through p."""
    sigma, tol = ch.sigma, ch.tol
    try:
        hits = intersect_supports(support, sigma.support, tol)
    except CoincidentSupports:
        return []
    slack = tol.eps_geom / sigma.length
    found: list[ConnectingArc] = []
    for x, _ in hits:
        t = sigma.param_of(x)
        if t < -slack or t > 1.0 + slack:
            continue
        if t <= slack:
            x = sigma.start
        elif t >= 1.0 - slack:
            x = sigma.end
        if x.dist(p) <= tol.eps_geom:
            continue
        tau = support.tangent_at(x)
        for direction in (tau, -tau):
            try:
                arc = arc_with_tangent(direction, x, p, tol=tol)
            except DegenerateTangentArc:
                continue
            if leaves_sigma_left(arc, ch):
                found.append(connecting_arc(sigma, arc, tol))
    return found


def segment_constraints(seg: ArcSegment) -> list[SupportConstraint]:
    """Ways a segment can touch an arc: along its support or at an end."""
    return [TangentTo(seg.support), Through(seg.start), Through(seg.end)]


def _same_arc(a: ArcSegment, b: ArcSegment) -> bool:
    return (
        a.start.dist(b.start) <= 1e-9 * max(1.0, a.length)
        and abs(a.bulge - b.bulge) <= 1e-9 * max(1.0, abs(a.bulge))
    )


def fitted_arcs(
    ch: Channel, p: Point, segs: Sequence[int], cap: float | None = None
) -> Iterator[ConnectingArc]:
    """Connecting arcs to p fitted to a pair of constraints drawn from two
    of the given segments (index 0 is sigma), without repeats.

    Pairs are taken in order of the earlier segment.
    """
    cap = ch.cap() if cap is None else cap
    seen: list[ArcSegment] = []
    for i, a in enumerate(segs):
        for b in segs[i + 1 :]:
            for ca in segment_constraints(ch.segment(a)):
                for cb in segment_constraints(ch.segment(b)):
                    try:
                        supports = apollonius_arcs(p, ca, cb, cap, ch.tol)
                    except GeometryError:
                        continue
                    for support in supports:
                        for g in connecting_arcs_on(support, ch, p):
                            if any(_same_arc(g.arc, s) for s in seen):
                                continue
                            seen.append(g.arc)
                            yield g
