"""Tests for utils.py."""

from circular_visibility.fixtures import hk1, sq1
from circular_visibility.structs import Point
from circular_visibility.utils import consistent_hash, hash_key, query_key


def test_consistent_hash():
    """Tests for consistent_hash()."""
    assert consistent_hash("hello") == consistent_hash("hello")
    assert consistent_hash("hello") != consistent_hash("hello!")
    assert consistent_hash((1, 2.0)) == consistent_hash((1, 2.0))
    h = consistent_hash({"a": [1, 2, 3]})
    assert -(2**63) <= h < 2**63


def test_query_key():
    """Tests for query_key()."""
    ch = sq1().channel
    p = Point(0.5, 0.5)
    key = query_key(ch, p, 1e-6)
    assert key == query_key(sq1().channel, Point(0.5, 0.5), 1e-6)
    assert key != query_key(ch, Point(0.5, 0.25), 1e-6)
    assert key != query_key(ch, p, 1e-5)
    assert key != query_key(hk1().channel, p, 1e-6)
    assert all(c in "0123456789abcdef" for c in key)
    assert len(key) == 16


def test_hash_key():
    """Tests for hash_key()."""
    assert hash_key(0) == "0" * 16
    assert hash_key(1) == "0000000000000001"
    assert hash_key(-1) == "f" * 16
    for h in (1, 12345, 2**62, 2**63 - 1):
        assert hash_key(h) != hash_key(-h)
    assert len({hash_key(h) for h in range(-50, 50)}) == 100
