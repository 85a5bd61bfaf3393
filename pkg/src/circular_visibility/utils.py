"""Utility functions."""

import hashlib
import json
from typing import Any

from circular_visibility.channel import Channel
from circular_visibility.structs import Point


def consistent_hash(obj: Any) -> int:
    """A hash function that is consistent between sessions, unlike hash()."""
    obj_str = repr(obj)
    obj_bytes = obj_str.encode("utf-8")
    hash_hex = hashlib.sha256(obj_bytes).hexdigest()
    hash_int = int(hash_hex, 16) % 2**64
    # Signed 64-bit, like hash().
    return hash_int if hash_int < 2**63 else hash_int - 2**64


def hash_key(h: int) -> str:
    """A signed hash as 16 hex digits, distinct for h and -h."""
    return f"{h % 2**64:016x}"


def query_key(ch: Channel, p: Point, d_tol: float) -> str:
    """A stable identifier for a visibility query."""
    payload = json.dumps(
        {"channel": ch.to_json(), "point": p.to_json(), "d_tol": d_tol},
        sort_keys=True,
    )
    return hash_key(consistent_hash(payload))
