"""Tests for oracle.py."""

import pytest

from circular_visibility.delta import build_profile
from circular_visibility.engine import query_visibility
from circular_visibility.fixtures import all_fixtures, hk1, sq1
from circular_visibility.oracle import (
    DifferenceCase,
    OracleConfig,
    Verdict,
    _contained,
    blocking_sequence,
    delta_difference_case,
    delta_naive,
    oracle_visible,
    sample_connecting_arcs,
)
from circular_visibility.order import (
    connecting_arc,
    max_connecting_arc,
    min_connecting_arc,
)
from circular_visibility.structs import ArcSegment, Point

_P = Point(0.5, 0.5)

runslow = pytest.mark.skipif("not config.getoption('runslow')")


def test_oracle_config():
    """Tests for OracleConfig()."""
    cfg = OracleConfig(4, 6, 8)
    assert cfg.refined() == OracleConfig(8, 12, 16, cfg.margin)
    with pytest.raises(ValueError):
        OracleConfig(0, 6, 8)
    with pytest.raises(ValueError):
        OracleConfig(margin=0.0)


def test_sample_connecting_arcs():
    """Tests for sample_connecting_arcs()."""
    ch = sq1().channel
    arcs = list(sample_connecting_arcs(ch, _P, OracleConfig(4, 6, 8)))
    assert len(arcs) == 30
    for g in arcs:
        assert g.end.dist(_P) < 1e-9
        assert ch.sigma.distance_to(g.start) < 1e-9


def test_oracle_visible():
    """Tests for oracle_visible()."""
    ch = sq1().channel
    result = oracle_visible(ch, _P, OracleConfig(8, 12, 16))
    assert result.verdict is Verdict.DEFINITELY_VISIBLE
    assert result.witness is not None
    assert result.witness.end.dist(_P) < 1e-9

    fixture = hk1()
    cfg = OracleConfig(8, 12, 16)
    for p in fixture.blocked:
        assert oracle_visible(fixture.channel, p, cfg).verdict is not (
            Verdict.DEFINITELY_VISIBLE
        )
    for p in fixture.visible:
        result = oracle_visible(fixture.channel, p, cfg)
        assert result.verdict is Verdict.DEFINITELY_VISIBLE


def test_delta_naive():
    """Tests that delta_naive() agrees with build_profile()."""
    ch = sq1().channel
    arcs = list(sample_connecting_arcs(ch, _P, OracleConfig(4, 6, 8)))
    arcs += [min_connecting_arc(ch, _P), max_connecting_arc(ch, _P)]
    for gamma in arcs:
        fast = build_profile(gamma, ch)
        slow = delta_naive(gamma, ch)
        assert slow.total() == fast.total()
        for j in range(1, ch.n + 1):
            assert slow.entry(j) == fast.entry(j)


def test_delta_difference_case():
    """Tests for delta_difference_case()."""
    ch = sq1().channel
    least = min_connecting_arc(ch, _P)
    greatest = max_connecting_arc(ch, _P)
    case, diff = delta_difference_case(least, greatest, Point(1.0, 1.0))
    assert case is DifferenceCase.EARLIER_START_DISJOINT
    assert diff == 1
    with pytest.raises(ValueError):
        delta_difference_case(greatest, least, Point(1.0, 1.0))

    start = Point(0.5, 0.0)
    steep = connecting_arc(ch.sigma, ArcSegment(start, _P, -0.2))
    shallow = connecting_arc(ch.sigma, ArcSegment(start, _P, 0.2))
    case, diff = delta_difference_case(steep, shallow, start)
    assert case is DifferenceCase.SAME_START
    assert diff == 0
    assert delta_difference_case(steep, shallow, shallow.arc.point_at(0.5)) == (
        DifferenceCase.SAME_START,
        1,
    )


def test_oracle_blocked():
    """Tests that oracle_visible() finds an alternating sequence on hk1."""
    fixture = hk1()
    [p] = fixture.blocked
    result = oracle_visible(fixture.channel, p, OracleConfig(8, 12, 16))
    assert result.verdict is Verdict.DEFINITELY_BLOCKED
    assert result.witness is not None
    a, b, c = result.sequence
    assert a.side is c.side and b.side is not a.side
    assert a.t_gamma <= b.t_gamma <= c.t_gamma


def test_contained():
    """Tests for _contained()."""
    ch = sq1().channel
    cfg = OracleConfig(4, 6, 8)
    straight = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), _P))
    assert _contained(straight, ch, cfg, 0.0)
    assert _contained(straight, ch, cfg, 0.4)
    assert not _contained(straight, ch, cfg, 0.6)
    hook = hk1().channel
    across = connecting_arc(hook.sigma, ArcSegment(Point(0.5, 0.0), Point(4.5, 0.5)))
    assert not _contained(across, hook, cfg, 0.0)


def test_blocking_sequence():
    """Tests for blocking_sequence()."""
    ch = sq1().channel
    straight = connecting_arc(ch.sigma, ArcSegment(Point(0.5, 0.0), _P))
    assert blocking_sequence(straight, ch, 1e-3) == ()
    fixture = hk1()
    [p] = fixture.blocked
    cert = query_visibility(fixture.channel, p)
    assert not cert.visible
    sequence = blocking_sequence(cert.arc, fixture.channel, cert.d_tol)
    a, b, c = sequence
    assert a.side is c.side and b.side is not a.side


@runslow
def test_refinement_is_stable():
    """Tests that refining the grid never flips a definite verdict."""
    cfg = OracleConfig(6, 8, 8)
    definite = {Verdict.DEFINITELY_VISIBLE, Verdict.DEFINITELY_BLOCKED}
    for fixture in all_fixtures():
        for p in fixture.visible + fixture.blocked:
            coarse = oracle_visible(fixture.channel, p, cfg).verdict
            fine = oracle_visible(fixture.channel, p, cfg.refined()).verdict
            if coarse in definite and fine in definite:
                assert coarse is fine
