"""The visibility scan: starting from the least connecting arc, walk the
boundary from both ends of the active window, pushing the arc whenever
a segment violates it, until the arc is contained in the channel or an
alternating sequence of three restrictions proves the point blocked.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from circular_visibility.channel import Channel, Location, point_in_channel
from circular_visibility.delta import (
    DeltaEvent,
    DeltaProfile,
    RestrictionPoint,
    SegmentClass,
    build_profile,
    classify_events,
    classify_segment,
    contacts,
    delta_sign,
    segment_events,
    starting_restriction,
)
from circular_visibility.geometry import OverlapError
from circular_visibility.order import (
    ConnectingArc,
    Relation,
    compare,
    connecting_arc,
    fitted_arcs,
    leaves_sigma_left,
    max_connecting_arc,
    min_connecting_arc,
)
from circular_visibility.structs import ArcSegment, Point, Side


class PointNotInterior(Exception):
    """Raised when the query point is not strictly inside the channel."""


class NoCandidate(Exception):
    """Raised when no arc satisfies an update's restriction pattern."""


class InternalInvariantBroken(Exception):
    """Raised when the scan reaches a state its invariants exclude."""


@dataclass(frozen=True)
class AlternatingSequence:
    """Restriction points in arc order with strictly alternating sides."""

    entries: tuple[RestrictionPoint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        for a, b in zip(self.entries, self.entries[1:]):
            if a.side is b.side:
                raise ValueError(f"Sides do not alternate: {self.entries}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[RestrictionPoint]:
        return iter(self.entries)

    @property
    def is_left_blocking(self) -> bool:
        """Whether the first restriction is from the left."""
        return self.entries[0].side is Side.LEFT

    def to_json(self) -> list[dict[str, Any]]:
        """Serialize as a list of {"point", "side", "segment"} records."""
        return [e.to_json() for e in self.entries]


@dataclass(frozen=True)
class VisibilityCertificate:
    """The outcome of a query: a visibility arc, or an arc that leaves the
    channel together with a blocking sequence."""

    visible: bool
    arc: ConnectingArc
    sequence: AlternatingSequence | None = None
    iterations: int = 0
    d_tol: float = 0.0

    def to_json(self) -> dict[str, Any]:
        """Serialize in the certificate JSON format."""
        return {
            "visible": self.visible,
            "arc": self.arc.arc.to_json(),
            "sequence": self.sequence.to_json() if self.sequence else [],
            "iterations": self.iterations,
            "d_tol": self.d_tol,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any], ch: Channel) -> VisibilityCertificate:
        """Parse the output of to_json() against the channel it was made for."""
        try:
            arc = connecting_arc(ch.sigma, ArcSegment.from_json(obj["arc"]), ch.tol)
            entries = tuple(
                _restriction_from_json(e, arc, ch) for e in obj.get("sequence", [])
            )
            return cls(
                bool(obj["visible"]),
                arc,
                AlternatingSequence(entries) if entries else None,
                int(obj.get("iterations", 0)),
                float(obj.get("d_tol", 0.0)),
            )
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed certificate: {e}") from e


def _restriction_from_json(
    obj: dict[str, Any], gamma: ConnectingArc, ch: Channel
) -> RestrictionPoint:
    point = Point.from_json(obj["point"])
    j = int(obj["segment"])
    T = 0.0 if j == 0 else (j - 1) + ch.kappa.segment(j).param_of(point)
    t_gamma = 0.0 if j == 0 else gamma.arc.param_of(point)
    return RestrictionPoint(point, t_gamma, Side(obj["side"]), j, T)




def _arc_key(q: RestrictionPoint) -> tuple[float, bool]:
    # A starting restriction sorts first among points at the same parameter.
    return (q.t_gamma, q.segment != 0)


@dataclass
class EngineState:
    """Mutable state of one scan.

    Index 0 stands for sigma; L and R are the current restriction
    segments and l and r the scan cursors. The extremal restrictions
    from each side are kept up to date as segments are classified.
    """

    gamma: ConnectingArc
    L: int = 0
    R: int = 0
    l: int = 0
    r: int = 0
    delta_at_l: int = 0
    delta_at_r: int = 0
    iterations: int = 0
    pushes: int = 0
    min_left_restriction: RestrictionPoint | None = None
    max_left_restriction: RestrictionPoint | None = None
    min_right_restriction: RestrictionPoint | None = None
    max_right_restriction: RestrictionPoint | None = None
    restrictions: dict[int, tuple[RestrictionPoint, ...]] = field(
        default_factory=dict
    )
    _events: dict[int, list[DeltaEvent]] = field(default_factory=dict, repr=False)

    def points(self) -> Iterator[RestrictionPoint]:
        """All recorded restriction points of the window."""
        for points in self.restrictions.values():
            yield from points

    def events(self, ch: Channel, j: int) -> list[DeltaEvent]:
        """Events of kappa_j against the current arc, cached per arc."""
        if j == 0:
            return []
        if j not in self._events:
            self._events[j] = segment_events(self.gamma.arc, ch, j)
        return self._events[j]

    def record(self, q: RestrictionPoint) -> None:
        """Fold a restriction point into the extremal restrictions."""
        if q.side is Side.LEFT:
            lo, hi = self.min_left_restriction, self.max_left_restriction
        else:
            lo, hi = self.min_right_restriction, self.max_right_restriction
        if lo is None or _arc_key(q) < _arc_key(lo):
            lo = q
        if hi is None or _arc_key(q) > _arc_key(hi):
            hi = q
        if q.side is Side.LEFT:
            self.min_left_restriction, self.max_left_restriction = lo, hi
        else:
            self.min_right_restriction, self.max_right_restriction = lo, hi

    def classify(self, ch: Channel, j: int, entry: int, d_tol: float) -> SegmentClass:
        """Classify kappa_j and record its restriction points."""
        cls = classify_events(self.gamma.arc, ch, j, entry, self.events(ch, j), d_tol)
        if not cls.kind.is_violation and j not in self.restrictions:
            self.restrictions[j] = cls.restrictions
            for q in cls.restrictions:
                self.record(q)
        return cls

    def reset_arc(self, ch: Channel, gamma: ConnectingArc, d_tol: float) -> None:
        """Switch to a new arc and seed the window with sigma, L and R."""
        self.gamma = gamma
        self._events = {}
        self.restrictions = {}
        self.min_left_restriction = self.max_left_restriction = None
        self.min_right_restriction = self.max_right_restriction = None
        start = _starting_point(gamma, ch)
        if start is not None:
            self.restrictions[0] = (start,)
            self.record(start)
        self.delta_at_l = _restriction_entry(gamma, ch, self.l, Side.LEFT)
        self.delta_at_r = _restriction_entry(gamma, ch, self.r, Side.RIGHT)
        for j, entry in ((self.L, self.delta_at_l), (self.R, self.delta_at_r)):
            if j > 0:
                self.classify(ch, j, entry, d_tol)


def _starting_point(gamma: ConnectingArc, ch: Channel) -> RestrictionPoint | None:
    side = starting_restriction(gamma, ch)
    if side is None:
        return None
    return RestrictionPoint(gamma.start, 0.0, side, 0, 0.0)


def _restriction_entry(gamma: ConnectingArc, ch: Channel, j: int, side: Side) -> int:
    """Value at kappa_j(0) when kappa_j restricts gamma from side.

    Values on a restriction are 0 off the arc and +-1 on it. Nothing
    precedes kappa_1(0), so its value is always 0.
    """
    if j <= 1:
        return 0
    x = ch.kappa.segment(j).start
    if gamma.arc.distance_to(x) <= 2.0 * ch.tol.eps_geom:
        return delta_sign(side)
    return 0


def _precedes(a: RestrictionPoint, b: RestrictionPoint, eps: float) -> bool:
    if a.segment == 0:
        return a.t_gamma <= b.t_gamma + eps
    return a.t_gamma < b.t_gamma - eps


def _extremal_triple(
    min_left: RestrictionPoint | None,
    max_left: RestrictionPoint | None,
    min_right: RestrictionPoint | None,
    max_right: RestrictionPoint | None,
    eps: float,
) -> AlternatingSequence | None:
    """A left-right-left or right-left-right sequence made of extremal
    restrictions, if the extremes admit one."""
    sides = (
        ((min_left, max_left), (min_right, max_right)),
        ((min_right, max_right), (min_left, max_left)),
    )
    for (first, last), middles in sides:
        if first is None or last is None:
            continue
        for b in middles:
            if b is not None and _precedes(first, b, eps) and _precedes(b, last, eps):
                return AlternatingSequence((first, b, last))
    return None


def find_alt3(
    gamma: ConnectingArc, state: EngineState, eps: float = 1e-9
) -> AlternatingSequence | None:
    """An alternating sequence of three among the restrictions recorded
    for gamma in the window, read off the extremal restrictions."""
    if state.gamma is not gamma:
        raise ValueError("The state does not describe this arc.")
    return _extremal_triple(
        state.min_left_restriction,
        state.max_left_restriction,
        state.min_right_restriction,
        state.max_right_restriction,
        eps,
    )


def alternating_triple(
    points: Iterable[RestrictionPoint], eps: float = 1e-9
) -> AlternatingSequence | None:
    """An alternating sequence of three among arbitrary restriction points."""
    lefts, rights = [], []
    for q in points:
        (lefts if q.side is Side.LEFT else rights).append(q)
    return _extremal_triple(
        min(lefts, key=_arc_key, default=None),
        max(lefts, key=_arc_key, default=None),
        min(rights, key=_arc_key, default=None),
        max(rights, key=_arc_key, default=None),
        eps,
    )


def _contact_times(
    gamma: ConnectingArc, ch: Channel, j: int, side: Side
) -> list[float] | None:
    """Arc parameters where segment j restricts gamma from side, or None
    if it does not restrict gamma from that side."""
    if j == 0:
        return [0.0] if starting_restriction(gamma, ch) is side else None
    try:
        found = contacts(gamma.arc, ch.kappa.segment(j), ch.tol)
    except OverlapError:
        return None
    if not found or any(s is not side for _, s in found):
        return None
    return [t for t, _ in found]


def _fits_pattern(
    gamma: ConnectingArc, ch: Channel, pattern: Sequence[tuple[int, Side]]
) -> bool:
    """Whether the segments restrict gamma from the given sides, in order."""
    last = -math.inf
    for j, side in pattern:
        times = _contact_times(gamma, ch, j, side)
        if times is None:
            return False
        later = [t for t in times if t > last or (j == 0 and t >= last)]
        if not later:
            return False
        last = min(later)
    return True


def _fits_sides(
    gamma: ConnectingArc, ch: Channel, pattern: Sequence[tuple[int, Side]]
) -> bool:
    """Whether the boundary segments restrict gamma from the given sides."""
    return all(
        _contact_times(gamma, ch, j, side) is not None for j, side in pattern if j
    )


def push_update(
    ch: Channel,
    p: Point,
    right_seg: int,
    left_seg: int,
    cap: float | None = None,
    current: ConnectingArc | None = None,
    strict: bool = True,
) -> ConnectingArc:
    """The connecting arc restricted from the right by right_seg and from
    the left by left_seg, in that order along the arc.

    With a current arc, only arcs greater than it are accepted and the
    least of them is returned. Without strict, only the sides of the
    boundary segments are checked: neither the order along the arc nor
    the starting restriction.
    """
    if right_seg == left_seg:
        raise NoCandidate(f"Segment {right_seg} cannot restrict from both sides.")
    # A starting restriction is first on the arc whichever side it has.
    if left_seg == 0:
        pattern = [(0, Side.LEFT), (right_seg, Side.RIGHT)]
    else:
        pattern = [(right_seg, Side.RIGHT), (left_seg, Side.LEFT)]
    fits = _fits_pattern if strict else _fits_sides
    passing = [
        g
        for g in fitted_arcs(ch, p, [right_seg, left_seg], cap)
        if fits(g, ch, pattern)
    ]
    if current is not None:
        passing = [
            g for g in passing if compare(current, g, ch.tol).relation is Relation.LESS
        ]
    if not passing:
        raise NoCandidate(
            f"No arc to {p} restricted by {right_seg} (right) and {left_seg} (left)."
        )
    radius = current.arc.radius if current is not None else math.inf

    def order(g1: ConnectingArc, g2: ConnectingArc) -> int:
        rel = compare(g1, g2, ch.tol).relation
        if rel is Relation.EQUAL:
            d1, d2 = abs(g1.arc.radius - radius), abs(g2.arc.radius - radius)
            return (d1 > d2) - (d1 < d2)
        return rel.value

    best = min(passing, key=functools.cmp_to_key(order))
    logging.debug(
        f"Pushed to {best.arc} ({len(passing)} candidates, "
        f"right={right_seg}, left={left_seg}, strict={strict})."
    )
    return best


def contact_restrictions(
    gamma: ConnectingArc, ch: Channel, segs: Iterable[int]
) -> list[RestrictionPoint]:
    """Restriction points of gamma on the given segments, taken from where
    each segment meets gamma, plus the starting restriction."""
    found: list[RestrictionPoint] = []
    start = _starting_point(gamma, ch)
    if start is not None:
        found.append(start)
    for j in dict.fromkeys(segs):
        if j == 0:
            continue
        seg = ch.kappa.segment(j)
        try:
            touches = contacts(gamma.arc, seg, ch.tol)
        except OverlapError:
            continue
        if not touches or len({s for _, s in touches}) > 1:
            continue
        for t, side in touches:
            x = gamma.arc.point_at(t)
            found.append(RestrictionPoint(x, t, side, j, (j - 1) + seg.param_of(x)))
    return found


def blocking_triple_probe(
    ch: Channel, p: Point, segs: Sequence[int], cap: float | None = None
) -> ConnectingArc | None:
    """A connecting arc fitted to two of the given segments on which the
    given segments form an alternating sequence of three restrictions,
    if one exists."""
    segs = list(dict.fromkeys(segs))
    for g in fitted_arcs(ch, p, segs, cap):
        if alternating_triple(contact_restrictions(g, ch, segs)) is not None:
            logging.debug(f"Alternating triple among {segs} on {g.arc}.")
            return g
    return None


def audit(gamma: ConnectingArc, ch: Channel, d_tol: float) -> list[SegmentClass]:
    """Classes of every boundary segment against gamma."""
    profile = build_profile(gamma, ch)
    return [classify_segment(profile, j, d_tol) for j in range(1, ch.n + 1)]


def certify(
    gamma: ConnectingArc, ch: Channel, d_tol: float, iterations: int = 0
) -> VisibilityCertificate | None:
    """A certificate carried by gamma alone: gamma itself when it stays in
    the channel, or an alternating sequence of three on gamma when it
    leaves it. None when gamma proves neither."""
    classes = audit(gamma, ch, d_tol)
    if not any(c.kind.is_violation for c in classes):
        return VisibilityCertificate(True, gamma, None, iterations, d_tol)
    points = [q for c in classes if not c.kind.is_violation for q in c.restrictions]
    start = _starting_point(gamma, ch)
    if start is not None:
        points.append(start)
    sequence = alternating_triple(points)
    if sequence is None:
        return None
    return VisibilityCertificate(False, gamma, sequence, iterations, d_tol)


def search_certificate(
    ch: Channel,
    p: Point,
    d_tol: float,
    iterations: int = 0,
    cap: float | None = None,
) -> VisibilityCertificate | None:
    """Certify the first of the extremal arcs and the arcs fitted to any
    two boundary segments that proves either outcome.

    This takes time cubic in the number of segments.
    """
    logging.warning(f"Searching every fitted arc to {p} for a certificate.")
    candidates = [min_connecting_arc(ch, p, cap), max_connecting_arc(ch, p, cap)]
    for gamma in (*candidates, *fitted_arcs(ch, p, range(ch.n + 1), cap)):
        cert = certify(gamma, ch, d_tol, iterations)
        if cert is not None:
            return cert
    return None


def _finish(
    gamma: ConnectingArc, ch: Channel, p: Point, d_tol: float, iterations: int
) -> VisibilityCertificate:
    """Certify gamma over the whole boundary, searching further when gamma
    alone proves nothing."""
    cert = certify(gamma, ch, d_tol, iterations)
    if cert is None:
        cert = search_certificate(ch, p, d_tol, iterations)
    if cert is None:
        raise InternalInvariantBroken(
            f"Arc {gamma.arc} leaves the channel without a blocking sequence."
        )
    outcome = "Visible" if cert.visible else "Blocked"
    logging.info(f"{outcome} at {cert.arc.arc} after {iterations} iterations.")
    return cert


def _update(
    state: EngineState,
    ch: Channel,
    p: Point,
    d_tol: float,
    right_seg: int,
    left_seg: int,
) -> ConnectingArc | VisibilityCertificate:
    """Push the arc. When no arc fits, look for an alternating sequence of
    three on the current arc or on an arc fitted to the five current
    segments, then retry the push with sides only."""
    try:
        return push_update(ch, p, right_seg, left_seg, current=state.gamma)
    except NoCandidate as e:
        logging.debug(f"{e} Looking for an alternating sequence.")
        failure = e
    cert = certify(state.gamma, ch, d_tol, state.iterations)
    if cert is not None:
        logging.info(f"Blocked at {cert.arc.arc} after {state.iterations} iterations.")
        return cert
    star = blocking_triple_probe(ch, p, [0, state.L, state.R, state.l, state.r])
    if star is not None:
        cert = certify(star, ch, d_tol, state.iterations)
        if cert is not None:
            logging.info(f"Settled at {star.arc} after {state.iterations} iterations.")
            return cert
    try:
        return push_update(
            ch, p, right_seg, left_seg, current=state.gamma, strict=False
        )
    except NoCandidate:
        pass
    cert = search_certificate(ch, p, d_tol, state.iterations)
    if cert is None:
        raise InternalInvariantBroken(str(failure)) from failure
    return cert


def scan_step(
    state: EngineState, ch: Channel, p: Point, d_tol: float
) -> EngineState | VisibilityCertificate:
    """One pass of the scan loop."""
    n = ch.n
    state.iterations += 1
    if state.iterations > 2 * n:
        raise InternalInvariantBroken(
            f"Scan did not finish within {2 * n} iterations."
        )
    if state.l < n:
        state.delta_at_l += sum(e.contribution for e in state.events(ch, state.l))
        state.l += 1
    if state.r < n:
        state.delta_at_r += sum(e.contribution for e in state.events(ch, state.r))
        state.r += 1
    left_cls = state.classify(ch, state.l, state.delta_at_l, d_tol)
    right_cls = state.classify(ch, state.r, state.delta_at_r, d_tol)

    if find_alt3(state.gamma, state) is not None:
        return _finish(state.gamma, ch, p, d_tol, state.iterations)

    if left_cls.left_clearance > 0.0:
        logging.debug(f"Segment {state.l} violates {state.gamma.arc} from the left.")
        outcome = _update(state, ch, p, d_tol, state.R, state.l)
        if isinstance(outcome, VisibilityCertificate):
            return outcome
        state.L, state.r = state.l, state.R
    elif right_cls.right_clearance > 0.0:
        logging.debug(f"Segment {state.r} violates {state.gamma.arc} from the right.")
        outcome = _update(state, ch, p, d_tol, state.r, state.L)
        if isinstance(outcome, VisibilityCertificate):
            return outcome
        state.R, state.l = state.r, state.L
    else:
        return state
    state.pushes += 1
    state.reset_arc(ch, outcome, d_tol)
    return state


def query_visibility(
    ch: Channel,
    p: Point,
    d_tol: float | None = None,
    trace: list[EngineState] | None = None,
) -> VisibilityCertificate:
    """Decide whether p is circularly visible from sigma."""
    d_tol = ch.default_d_tol() if d_tol is None else d_tol
    location = point_in_channel(ch, p)
    if location is not Location.INTERIOR:
        raise PointNotInterior(f"{p} is {location.value}, not interior.")
    gamma = min_connecting_arc(ch, p)
    state = EngineState(gamma)
    state.reset_arc(ch, gamma, d_tol)
    logging.debug(f"Scanning {ch.n} segments from {gamma.arc}.")
    while state.l < ch.n or state.r < ch.n:
        result = scan_step(state, ch, p, d_tol)
        if trace is not None:
            trace.append(_snapshot(state))
        if isinstance(result, VisibilityCertificate):
            return result
    return _finish(state.gamma, ch, p, d_tol, state.iterations)


def _snapshot(state: EngineState) -> EngineState:
    return dataclasses.replace(state, restrictions=dict(state.restrictions), _events={})


def verify_certificate(ch: Channel, p: Point, cert: VisibilityCertificate) -> bool:
    """Re-derive the profile of the certificate's arc and check its claim."""
    gamma, tol = cert.arc, ch.tol
    if (
        gamma.end.dist(p) > tol.eps_geom
        or ch.sigma.distance_to(gamma.start) > tol.eps_geom
    ):
        return False
    if not leaves_sigma_left(gamma.arc, ch):
        return False
    profile = build_profile(gamma, ch)
    classes = [classify_segment(profile, j, cert.d_tol) for j in range(1, ch.n + 1)]
    violated = any(c.kind.is_violation for c in classes)
    if cert.visible:
        return not violated
    if not violated or cert.sequence is None or len(cert.sequence) < 3:
        return False
    entries = list(cert.sequence)
    for a, b in zip(entries, entries[1:]):
        if not _precedes(a, b, 1e-9):
            return False
    for q in entries:
        if q.segment == 0:
            if starting_restriction(gamma, ch) is not q.side:
                return False
        elif _value_near(profile, q.T) != delta_sign(q.side):
            return False
    return True


def _value_near(profile: DeltaProfile, T: float, eps: float = 1e-7) -> int:
    """Value at T, snapped to an event parameter read back from JSON."""
    near = [e.T for e in profile.events if abs(e.T - T) <= eps]
    return profile.prefix(near[0] if near else T)
