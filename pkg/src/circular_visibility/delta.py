"""Signed approach and leave counts of a boundary path against a
connecting arc, and the per-segment restriction and violation classes
derived from them.

An event is recorded wherever the path meets the arc. Approaching from
the right counts +1 and from the left -1; leaving to the left counts +1
and to the right -1. The running sum up to a boundary point q (including
the approach at q but not the leave) is the value at q. It is odd
exactly when q lies on the arc.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from circular_visibility.channel import Channel
from circular_visibility.geometry import OverlapError, branch_side, intersect
from circular_visibility.order import ConnectingArc
from circular_visibility.structs import (
    DEFAULT_TOLERANCES,
    ArcSegment,
    CutKind,
    Direction,
    Point,
    Side,
    Tolerances,
)

_PENETRATION_SAMPLES = 33


class EventCause(enum.Enum):
    """How the boundary meets the arc at an event."""

    APPROACH_LEFT = "approach_left"
    APPROACH_RIGHT = "approach_right"
    LEAVE_LEFT = "leave_left"
    LEAVE_RIGHT = "leave_right"

    @property
    def contribution(self) -> int:
        """The signed count this cause adds."""
        return _CONTRIBUTIONS[self]

    @property
    def is_approach(self) -> bool:
        """Whether the boundary arrives at the arc here."""
        return self in (EventCause.APPROACH_LEFT, EventCause.APPROACH_RIGHT)

    @classmethod
    def approach(cls, side: Side) -> EventCause:
        """Approach from the given side."""
        return cls.APPROACH_LEFT if side is Side.LEFT else cls.APPROACH_RIGHT

    @classmethod
    def leave(cls, side: Side) -> EventCause:
        """Leave to the given side."""
        return cls.LEAVE_LEFT if side is Side.LEFT else cls.LEAVE_RIGHT


_CONTRIBUTIONS = {
    EventCause.APPROACH_LEFT: -1,
    EventCause.APPROACH_RIGHT: 1,
    EventCause.LEAVE_LEFT: 1,
    EventCause.LEAVE_RIGHT: -1,
}

# Side before and after the meeting point, for interior cuts.
_CUT_SIDES = {
    CutKind.CROSS_FROM_RIGHT: (Side.RIGHT, Side.LEFT),
    CutKind.CROSS_FROM_LEFT: (Side.LEFT, Side.RIGHT),
    CutKind.TOUCH_LEFT: (Side.LEFT, Side.LEFT),
    CutKind.TOUCH_RIGHT: (Side.RIGHT, Side.RIGHT),
}


@dataclass(frozen=True)
class DeltaEvent:
    """One approach or leave of boundary segment `segment` at global
    parameter T."""

    T: float
    segment: int
    t_gamma: float
    point: Point
    cause: EventCause

    @property
    def contribution(self) -> int:
        """The signed count of this event."""
        return self.cause.contribution

    @property
    def sort_key(self) -> tuple[float, int]:
        """Approaches sort before leaves at the same parameter."""
        return (self.T, 0 if self.cause.is_approach else 1)


class SegmentKind(enum.Enum):
    """Class of a boundary segment relative to a connecting arc."""

    VIOLATION_LEFT = "violation_left"
    VIOLATION_RIGHT = "violation_right"
    RESTRICTION_LEFT = "restriction_left"
    RESTRICTION_RIGHT = "restriction_right"
    NEUTRAL = "neutral"

    @property
    def is_violation(self) -> bool:
        """Whether the arc leaves the channel at this segment."""
        return self in (SegmentKind.VIOLATION_LEFT, SegmentKind.VIOLATION_RIGHT)


@dataclass(frozen=True)
class RestrictionPoint:
    """A boundary point on the arc where the boundary stays on one side."""

    point: Point
    t_gamma: float
    side: Side
    segment: int
    T: float

    def to_json(self) -> dict:
        """Serialize as an alternating sequence entry."""
        return {
            "point": self.point.to_json(),
            "side": self.side.value,
            "segment": self.segment,
        }


@dataclass(frozen=True)
class SegmentClass:
    """Classification of one boundary segment against an arc."""

    kind: SegmentKind
    witness: Point
    clearance: float = 0.0
    left_clearance: float = 0.0
    right_clearance: float = 0.0
    restrictions: tuple[RestrictionPoint, ...] = ()

    def restrictions_on(self, side: Side) -> list[RestrictionPoint]:
        """Restriction points from one side, in arc order."""
        return sorted(
            (r for r in self.restrictions if r.side is side), key=lambda r: r.t_gamma
        )


@dataclass(frozen=True)
class DeltaProfile:
    """All events of a channel boundary against one connecting arc."""

    arc: ConnectingArc
    channel: Channel
    events: tuple[DeltaEvent, ...]
    _by_segment: dict[int, tuple[DeltaEvent, ...]] = field(
        init=False, repr=False, compare=False
    )
    _entries: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        events = tuple(sorted(self.events, key=lambda e: e.sort_key))
        object.__setattr__(self, "events", events)
        by_segment: dict[int, list[DeltaEvent]] = {}
        for e in events:
            by_segment.setdefault(e.segment, []).append(e)
        object.__setattr__(
            self, "_by_segment", {j: tuple(es) for j, es in by_segment.items()}
        )
        entries = [0]
        for j in range(1, self.channel.n + 1):
            entries.append(
                entries[-1] + sum(e.contribution for e in by_segment.get(j, ()))
            )
        object.__setattr__(self, "_entries", tuple(entries))

    def total(self) -> int:
        """The count over the whole boundary."""
        return self._entries[-1]

    def entry(self, j: int) -> int:
        """The value at the start of segment j: all events of earlier
        segments."""
        return self._entries[j - 1]

    def segment_events(self, j: int) -> tuple[DeltaEvent, ...]:
        """Events owned by segment j, in order."""
        return self._by_segment.get(j, ())

    def prefix(self, T: float) -> int:
        """The value at the boundary point with global parameter T."""
        return sum(
            e.contribution
            for e in self.events
            if e.T < T or (e.T == T and e.cause.is_approach)
        )

    def to_json(self) -> list[dict]:
        """Serialize the event list."""
        return [
            {
                "T": e.T,
                "segment": e.segment,
                "contribution": e.contribution,
                "cause": e.cause.value,
            }
            for e in self.events
        ]


def _on_arc(gamma: ArcSegment, x: Point, tol: Tolerances) -> bool:
    return gamma.distance_to(x) <= 2.0 * tol.eps_geom


def _approach_side(
    gamma: ArcSegment, x: Point, seg: ArcSegment, tol: Tolerances
) -> Side:
    # Walk backwards from the end of seg.
    u = -seg.tangent_at(1.0)
    return branch_side(gamma.support, x, u, -seg.curvature, tol)


def _leave_side(gamma: ArcSegment, x: Point, seg: ArcSegment, tol: Tolerances) -> Side:
    return branch_side(gamma.support, x, seg.tangent_at(0.0), seg.curvature, tol)


def _path_events(
    gamma: ArcSegment,
    path: Sequence[ArcSegment],
    j: int,
    tol: Tolerances,
    closing_rules: bool,
) -> list[DeltaEvent]:
    """Events owned by segment j (1-based) of path.

    A segment owns the leave at its start and the approach at its end.
    With closing_rules the path is a channel boundary, and its start
    counts as approached from the right when it lies on gamma.
    """
    seg = path[j - 1]
    base = float(j - 1)
    events: list[DeltaEvent] = []

    x0 = seg.start
    if _on_arc(gamma, x0, tol):
        t_gamma = gamma.param_of(x0)
        if j == 1 and closing_rules:
            events.append(DeltaEvent(base, j, t_gamma, x0, EventCause.APPROACH_RIGHT))
        side = _leave_side(gamma, x0, seg, tol)
        events.append(DeltaEvent(base, j, t_gamma, x0, EventCause.leave(side)))

    slack = tol.eps_geom / seg.length
    for cut in intersect(seg, gamma, tol):
        if cut.t_self <= slack or cut.t_self >= 1.0 - slack:
            continue
        before, after = _CUT_SIDES[cut.kind]
        T = base + cut.t_self
        events.append(
            DeltaEvent(T, j, cut.t_other, cut.point, EventCause.approach(before))
        )
        events.append(DeltaEvent(T, j, cut.t_other, cut.point, EventCause.leave(after)))

    x1 = seg.end
    if _on_arc(gamma, x1, tol):
        side = _approach_side(gamma, x1, seg, tol)
        events.append(
            DeltaEvent(float(j), j, gamma.param_of(x1), x1, EventCause.approach(side))
        )
    return events


def segment_events(gamma: ArcSegment, ch: Channel, j: int) -> list[DeltaEvent]:
    """Events of kappa_j against gamma."""
    return _path_events(gamma, ch.kappa.segments, j, ch.tol, closing_rules=True)


def delta(
    gamma: ArcSegment,
    alpha: Sequence[ArcSegment],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> int:
    """The signed count of alpha against gamma.

    The start of alpha is only left and its end only approached.
    """
    path = list(alpha)
    return sum(
        e.contribution
        for j in range(1, len(path) + 1)
        for e in _path_events(gamma, path, j, tol, closing_rules=False)
    )


def build_profile(gamma: ConnectingArc, ch: Channel) -> DeltaProfile:
    """Events of the whole channel boundary against gamma."""
    events = [e for j in range(1, ch.n + 1) for e in segment_events(gamma.arc, ch, j)]
    profile = DeltaProfile(gamma, ch, tuple(events))
    logging.debug(f"Profile of {gamma.arc} has {len(events)} events.")
    return profile


def _deepest(gamma: ArcSegment, piece: ArcSegment) -> tuple[float, float]:
    """The largest distance from piece to gamma and where it occurs."""
    ts = np.linspace(0.0, 1.0, _PENETRATION_SAMPLES)
    dists = np.array([gamma.distance_to(piece.point_at(float(t))) for t in ts])
    i = int(np.argmax(dists))
    lo, hi = ts[max(0, i - 1)], ts[min(len(ts) - 1, i + 1)]
    res = minimize_scalar(
        lambda t: -gamma.distance_to(piece.point_at(float(t))),
        bounds=(float(lo), float(hi)),
        method="bounded",
        options={"xatol": 1e-10},
    )
    if -float(res.fun) > dists[i]:
        return -float(res.fun), float(res.x)
    return float(dists[i]), float(ts[i])


def penetration(gamma: ArcSegment, piece: ArcSegment) -> float:
    """Largest distance from a point of piece to gamma."""
    return _deepest(gamma, piece)[0]


def _side_of_value(v: int) -> Side:
    return Side.RIGHT if v > 0 else Side.LEFT


def classify_events(
    gamma: ArcSegment,
    ch: Channel,
    j: int,
    entry: int,
    events: Sequence[DeltaEvent],
    d_tol: float,
) -> SegmentClass:
    """Classify kappa_j from its entry value and the events it owns."""
    seg = ch.kappa.segment(j)
    lo, hi = float(j - 1), float(j)
    # Positions on the segment; the end breakpoint belongs to the next one.
    positions = sorted({e.T for e in events if e.T < hi or j == ch.n})
    values: set[int] = set()
    restrictions: list[RestrictionPoint] = []
    clearances = {Side.LEFT: 0.0, Side.RIGHT: 0.0}
    witnesses: dict[Side, Point] = {}

    def value_at(T: float, closed: bool) -> int:
        return entry + sum(
            e.contribution
            for e in events
            if e.T < T or (e.T == T and (closed or e.cause.is_approach))
        )

    def visit_interval(a: float, b: float) -> None:
        v = value_at(a, closed=True)
        if abs(v) < 2:
            values.add(v)
            return
        piece = seg.sub_arc(a - lo, b - lo)
        depth, t_deep = _deepest(gamma, piece)
        side = _side_of_value(v)
        if depth <= d_tol:
            return
        values.add(v)
        if depth > clearances[side]:
            clearances[side] = depth
            witnesses[side] = piece.point_at(t_deep)

    if not positions or positions[0] > lo:
        visit_interval(lo, positions[0] if positions else hi)
    for k, T in enumerate(positions):
        v = value_at(T, closed=False)
        if abs(v) == 1:
            first = next(e for e in events if e.T == T)
            restrictions.append(
                RestrictionPoint(first.point, first.t_gamma, _side_of_value(v), j, T)
            )
        if abs(v) < 2:
            values.add(v)
        nxt = positions[k + 1] if k + 1 < len(positions) else hi
        if nxt > T:
            visit_interval(T, nxt)

    left_c, right_c = clearances[Side.LEFT], clearances[Side.RIGHT]
    restrictions.sort(key=lambda r: r.t_gamma)
    lefts = [r for r in restrictions if r.side is Side.LEFT]
    rights = [r for r in restrictions if r.side is Side.RIGHT]
    kind, witness, clearance = SegmentKind.NEUTRAL, seg.point_at(0.5), 0.0
    if left_c > 0.0:
        kind, clearance = SegmentKind.VIOLATION_LEFT, left_c
        witness = witnesses[Side.LEFT]
    elif right_c > 0.0:
        kind, clearance = SegmentKind.VIOLATION_RIGHT, right_c
        witness = witnesses[Side.RIGHT]
    elif lefts and values <= {-1, 0}:
        kind, witness = SegmentKind.RESTRICTION_LEFT, lefts[0].point
    elif rights and values <= {0, 1}:
        kind, witness = SegmentKind.RESTRICTION_RIGHT, rights[-1].point
    return SegmentClass(
        kind, witness, clearance, left_c, right_c, tuple(restrictions)
    )


def classify_segment(profile: DeltaProfile, j: int, d_tol: float) -> SegmentClass:
    """Classify kappa_j against the profile's arc."""
    return classify_events(
        profile.arc.arc,
        profile.channel,
        j,
        profile.entry(j),
        profile.segment_events(j),
        d_tol,
    )


def starting_restriction(gamma: ConnectingArc, ch: Channel) -> Side | None:
    """Whether the start of gamma restricts it from the left or right.

    It is a restriction from the left when sigma lies locally right of
    the circle of gamma at gamma(0).
    """
    sigma, arc, tol = ch.sigma, gamma.arc, ch.tol
    branches: list[tuple[Direction, float]] = []
    if gamma.t_sigma < 1.0:
        branches.append((sigma.tangent_at(gamma.t_sigma), sigma.curvature))
    if gamma.t_sigma > 0.0:
        branches.append((-sigma.tangent_at(gamma.t_sigma), -sigma.curvature))
    try:
        sides = {branch_side(arc.support, arc.start, u, k, tol) for u, k in branches}
    except OverlapError:
        return None
    if len(sides) != 1:
        return None
    return sides.pop().opposite()


def contacts(
    gamma: ArcSegment, seg: ArcSegment, tol: Tolerances = DEFAULT_TOLERANCES
) -> list[tuple[float, Side]]:
    """Where seg meets gamma and on which side seg lies just before or
    after, as (t_gamma, side) pairs in arc order.

    A crossing contributes both sides.
    """
    events = _path_events(gamma, [seg], 1, tol, closing_rules=False)
    found = [(e.t_gamma, _CAUSE_SIDES[e.cause]) for e in events]
    return sorted(found, key=lambda c: c[0])


def delta_sign(side: Side) -> int:
    """The value a restriction from this side takes: +1 right, -1 left."""
    return 1 if side is Side.RIGHT else -1


_CAUSE_SIDES = {
    EventCause.APPROACH_LEFT: Side.LEFT,
    EventCause.LEAVE_LEFT: Side.LEFT,
    EventCause.APPROACH_RIGHT: Side.RIGHT,
    EventCause.LEAVE_RIGHT: Side.RIGHT,
}
