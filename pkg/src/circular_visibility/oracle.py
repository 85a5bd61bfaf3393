"""Brute-force ground truth for tests: visibility by sampling connecting
arcs, and event profiles recomputed from scratch with sampled sides."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from circular_visibility.channel import Channel
from circular_visibility.delta import (
    DeltaEvent,
    DeltaProfile,
    EventCause,
    RestrictionPoint,
    classify_segment,
    starting_restriction,
)
from circular_visibility.geometry import (
    DegenerateTangentArc,
    OverlapError,
    arc_with_tangent,
    intersect,
)
from circular_visibility.order import (
    ConnectingArc,
    Relation,
    compare,
    connecting_arc,
    fitted_arcs,
)
from circular_visibility.structs import ArcSegment, Point, Side


@dataclass(frozen=True)
class OracleConfig:
    """Sampling resolution of the oracle."""

    start_samples: int = 24
    angle_samples: int = 48
    arc_samples: int = 64
    margin: float = 1e-3

    def __post_init__(self) -> None:
        if min(self.start_samples, self.angle_samples, self.arc_samples) <= 0:
            raise ValueError(f"Sample counts must be positive: {self}")
        if self.margin <= 0:
            raise ValueError(f"Margin must be positive: {self.margin}")

    def refined(self) -> OracleConfig:
        """The same config at twice the resolution."""
        return OracleConfig(
            2 * self.start_samples,
            2 * self.angle_samples,
            2 * self.arc_samples,
            self.margin,
        )


class Verdict(enum.Enum):
    """What sampling can say about a query."""

    DEFINITELY_VISIBLE = "definitely_visible"
    DEFINITELY_BLOCKED = "definitely_blocked"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleVerdict:
    """A verdict plus its witness arc, and for blocked points the
    alternating restrictions found on it."""

    verdict: Verdict
    witness: ConnectingArc | None = None
    sequence: tuple[RestrictionPoint, ...] = ()


def sample_connecting_arcs(
    ch: Channel, p: Point, cfg: OracleConfig
) -> Iterator[ConnectingArc]:
    """Arcs to p from a grid of start points and departure angles."""
    sigma, tol = ch.sigma, ch.tol
    for t in np.linspace(0.0, 1.0, cfg.start_samples + 1):
        start = sigma.point_at(float(t))
        if start.dist(p) <= tol.eps_geom:
            continue
        tangent = sigma.tangent_at(float(t))
        for k in range(cfg.angle_samples):
            angle = math.pi * (k + 0.5) / cfg.angle_samples
            try:
                arc = arc_with_tangent(tangent.rotated(angle), start, p, tol=tol)
            except DegenerateTangentArc:
                continue
            yield connecting_arc(sigma, arc, tol)


def _clearance(arc: ArcSegment, ch: Channel, cfg: OracleConfig) -> float:
    """Smallest distance from the arc, away from its start, to kappa."""
    ts = np.linspace(0.0, 1.0, cfg.arc_samples + 1)[1:]
    best = math.inf
    for t in ts:
        q = arc.point_at(float(t))
        for seg in ch.kappa:
            best = min(best, seg.distance_to(q))
    return best


def _contained(
    gamma: ConnectingArc, ch: Channel, cfg: OracleConfig, margin: float
) -> bool:
    tol = ch.tol
    try:
        if any(intersect(gamma.arc, seg, tol) for seg in ch.kappa):
            return False
        cuts = intersect(gamma.arc, ch.sigma, tol)
    except OverlapError:
        return False
    slack = tol.eps_geom / gamma.arc.length
    if any(c.t_self > slack for c in cuts):
        return False
    return margin <= 0.0 or _clearance(gamma.arc, ch, cfg) >= margin


def _naive_triple(
    points: list[RestrictionPoint], eps: float = 1e-9
) -> tuple[RestrictionPoint, ...]:
    """The first alternating triple over all ordered triples of points."""

    def before(a: RestrictionPoint, b: RestrictionPoint) -> bool:
        if a.segment == 0:
            return a.t_gamma <= b.t_gamma + eps
        return a.t_gamma < b.t_gamma - eps

    for a in points:
        for b in points:
            if b.side is a.side or not before(a, b):
                continue
            for c in points:
                if c.side is a.side and before(b, c):
                    return (a, b, c)
    return ()


def blocking_sequence(
    gamma: ConnectingArc, ch: Channel, margin: float
) -> tuple[RestrictionPoint, ...]:
    """Three alternating restrictions on gamma from the naive profile, or
    () when gamma stays within margin of the channel or has none."""
    try:
        profile = delta_naive(gamma, ch)
    except OverlapError:
        return ()
    classes = [classify_segment(profile, j, margin) for j in range(1, ch.n + 1)]
    if not any(c.kind.is_violation for c in classes):
        return ()
    points = [q for c in classes if not c.kind.is_violation for q in c.restrictions]
    side = starting_restriction(gamma, ch)
    if side is not None:
        points.append(RestrictionPoint(gamma.start, 0.0, side, 0, 0.0))
    return _naive_triple(points)


def oracle_visible(
    ch: Channel, p: Point, cfg: OracleConfig = OracleConfig()
) -> OracleVerdict:
    """Sample connecting arcs and decide visibility where sampling can.

    Visible needs one sampled arc that clears kappa by the margin.
    Blocked needs no sampled arc inside the channel at all, and one arc,
    sampled or fitted to two boundary segments, that leaves the channel
    by more than the margin and carries three alternating restrictions.
    """
    sampled = list(sample_connecting_arcs(ch, p, cfg))
    for gamma in sampled:
        if _contained(gamma, ch, cfg, cfg.margin):
            return OracleVerdict(Verdict.DEFINITELY_VISIBLE, gamma)
    if any(_contained(gamma, ch, cfg, 0.0) for gamma in sampled):
        return OracleVerdict(Verdict.UNKNOWN)
    for gamma in (*sampled, *fitted_arcs(ch, p, range(ch.n + 1))):
        sequence = blocking_sequence(gamma, ch, cfg.margin)
        if sequence:
            return OracleVerdict(Verdict.DEFINITELY_BLOCKED, gamma, sequence)
    return OracleVerdict(Verdict.UNKNOWN)


# Parameter offset used to look at either side of a meeting point.
_SIDE_OFFSET = 1e-4


def _side_at(gamma: ArcSegment, q: Point) -> Side | None:
    d = gamma.signed_distance(q)
    if d > 0:
        return Side.LEFT
    if d < 0:
        return Side.RIGHT
    return None


def _sampled_side(
    gamma: ArcSegment, seg: ArcSegment, t: float, forward: bool
) -> Side:
    h = _SIDE_OFFSET
    while h > 1e-9:
        s = min(1.0, t + h) if forward else max(0.0, t - h)
        side = _side_at(gamma, seg.point_at(s))
        if side is not None:
            return side
        h *= 0.1
    raise OverlapError(f"{seg} runs along {gamma} near parameter {t}.")


def delta_naive(gamma: ConnectingArc, ch: Channel) -> DeltaProfile:
    """The event profile recomputed from meeting points, reading every
    side off a nearby sample point of the boundary."""
    arc, tol = gamma.arc, ch.tol
    events: list[DeltaEvent] = []
    n = ch.n
    for j in range(1, n + 1):
        seg = ch.kappa.segment(j)
        meets: list[tuple[float, float, Point]] = []
        for cut in intersect(seg, arc, tol):
            meets.append((cut.t_self, cut.t_other, cut.point))
        for t_end, x in ((0.0, seg.start), (1.0, seg.end)):
            if arc.distance_to(x) <= 2.0 * tol.eps_geom and not any(
                abs(m[0] - t_end) * seg.length <= tol.eps_geom for m in meets
            ):
                meets.append((t_end, arc.param_of(x), x))
        slack = tol.eps_geom / seg.length
        for t, t_gamma, x in sorted(meets, key=lambda m: m[0]):
            at_start, at_end = t <= slack, t >= 1.0 - slack
            T = (j - 1) + (0.0 if at_start else 1.0 if at_end else t)
            if not at_start:
                side = _sampled_side(arc, seg, t, forward=False)
                events.append(DeltaEvent(T, j, t_gamma, x, EventCause.approach(side)))
            elif j == 1:
                # The boundary starts where sigma ends.
                events.append(DeltaEvent(T, j, t_gamma, x, EventCause.APPROACH_RIGHT))
            if not at_end:
                side = _sampled_side(arc, seg, t, forward=True)
                events.append(DeltaEvent(T, j, t_gamma, x, EventCause.leave(side)))
    return DeltaProfile(gamma, ch, tuple(events))


class DifferenceCase(enum.Enum):
    """How two ordered connecting arcs relate, for comparing their counts."""

    EARLIER_START_DISJOINT = "earlier_start_disjoint"
    SAME_START = "same_start"
    EARLIER_START_CROSSING = "earlier_start_crossing"
    LATER_START = "later_start"


def delta_difference_case(
    g1: ConnectingArc, g2: ConnectingArc, q: Point
) -> tuple[DifferenceCase, int]:
    """For g1 < g2 and a boundary point q on either arc, which case applies
    and the expected value at q under g2 minus the value under g1."""
    if compare(g1, g2).relation is not Relation.LESS:
        raise ValueError("The first arc must be less than the second.")
    eps = 1e-9 * max(1.0, g1.arc.length, g2.arc.length)
    if g1.start.dist(g2.start) <= eps:
        return DifferenceCase.SAME_START, 0 if q.dist(g1.start) <= eps else 1
    others = [
        c for c in intersect(g1.arc, g2.arc) if c.point.dist(g1.end) > eps
    ]
    if not others:
        if g1.t_sigma < g2.t_sigma:
            return DifferenceCase.EARLIER_START_DISJOINT, 1
        raise ValueError("Arcs starting in reverse order must cross.")
    cut = others[0]
    t1, t2 = cut.t_self, cut.t_other
    if q.dist(cut.point) <= eps:
        position = 0
    elif g1.arc.distance_to(q) <= eps:
        position = -1 if g1.arc.param_of(q) < t1 else 1
    else:
        position = -1 if g2.arc.param_of(q) < t2 else 1
    if g1.t_sigma < g2.t_sigma:
        return DifferenceCase.EARLIER_START_CROSSING, 2 + position
    return DifferenceCase.LATER_START, position
