"""Data structures."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Sequence

# Below this sweep the closed forms switch to their series limits.
_SMALL_SWEEP = 1e-8
_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class Point:
    """A point (or free vector) in the plane."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Point coordinates must be finite, got {self}.")

    def __add__(self, other: Point) -> Point:
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point) -> Point:
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Point:
        return Point(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> Point:
        return Point(self.x / s, self.y / s)

    def __neg__(self) -> Point:
        return Point(-self.x, -self.y)

    def dot(self, other: Point | Direction) -> float:
        """Inner product."""
        if isinstance(other, Direction):
            return self.x * other.dx + self.y * other.dy
        return self.x * other.x + self.y * other.y

    def cross(self, other: Point | Direction) -> float:
        """The z component of the 3D cross product."""
        if isinstance(other, Direction):
            return self.x * other.dy - self.y * other.dx
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        """Euclidean length."""
        return math.hypot(self.x, self.y)

    def dist(self, other: Point) -> float:
        """Euclidean distance to another point."""
        return math.hypot(self.x - other.x, self.y - other.y)

    def to_json(self) -> list[float]:
        """Serialize as [x, y]."""
        return [self.x, self.y]

    @classmethod
    def from_json(cls, obj: Sequence[Any]) -> Point:
        """Parse [x, y]."""
        if len(obj) != 2:
            raise ValueError(f"Expected [x, y], got {obj!r}.")
        return cls(float(obj[0]), float(obj[1]))


@dataclass(frozen=True)
class Direction:
    """A unit vector."""

    dx: float
    dy: float

    def __post_init__(self) -> None:
        if abs(math.hypot(self.dx, self.dy) - 1.0) > _UNIT_TOL:
            raise ValueError(f"Direction must have unit length, got {self}.")

    @classmethod
    def of(cls, v: Point) -> Direction:
        """Normalize a nonzero vector."""
        n = v.norm()
        if n == 0.0:
            raise ValueError("Cannot normalize the zero vector.")
        return cls(v.x / n, v.y / n)

    @classmethod
    def from_angle(cls, angle: float) -> Direction:
        """The direction at the given angle from the x axis."""
        return cls(math.cos(angle), math.sin(angle))

    def __neg__(self) -> Direction:
        return Direction(-self.dx, -self.dy)

    def as_point(self) -> Point:
        """The direction as a free vector."""
        return Point(self.dx, self.dy)

    def angle(self) -> float:
        """Angle from the x axis in (-pi, pi]."""
        return math.atan2(self.dy, self.dx)

    def rotated(self, angle: float) -> Direction:
        """Rotate counterclockwise by angle."""
        c, s = math.cos(angle), math.sin(angle)
        return Direction(c * self.dx - s * self.dy, s * self.dx + c * self.dy)

    def left_normal(self) -> Direction:
        """The direction rotated by +90 degrees."""
        return Direction(-self.dy, self.dx)

    def dot(self, other: Point | Direction) -> float:
        """Inner product."""
        if isinstance(other, Direction):
            return self.dx * other.dx + self.dy * other.dy
        return self.dx * other.x + self.dy * other.y

    def cross(self, other: Point | Direction) -> float:
        """The z component of the 3D cross product."""
        if isinstance(other, Direction):
            return self.dx * other.dy - self.dy * other.dx
        return self.dx * other.y - self.dy * other.x


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by all geometric predicates.

    eps_geom is a length. Channels rescale it by their diameter with
    scaled() so that predicates stay relative to the problem size.
    """

    eps_geom: float = 1e-9
    eps_bulge: float = 1e-12
    eps_angle: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("eps_geom", "eps_bulge", "eps_angle"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}.")

    def scaled(self, scale: float) -> Tolerances:
        """Tolerances for a problem of the given linear size."""
        return replace(self, eps_geom=self.eps_geom * max(scale, 1e-300))


DEFAULT_TOLERANCES = Tolerances()


class SideClass(enum.Enum):
    """Position of a point relative to a circle or line."""

    STRICT_LEFT = "strict_left"
    ON = "on"
    STRICT_RIGHT = "strict_right"

    def flipped(self) -> SideClass:
        """Swap left and right."""
        if self is SideClass.STRICT_LEFT:
            return SideClass.STRICT_RIGHT
        if self is SideClass.STRICT_RIGHT:
            return SideClass.STRICT_LEFT
        return self


class Side(enum.Enum):
    """Left or right of an oriented curve."""

    LEFT = "left"
    RIGHT = "right"

    def opposite(self) -> Side:
        """The other side."""
        return Side.RIGHT if self is Side.LEFT else Side.LEFT

    @property
    def sign(self) -> int:
        """+1 for left, -1 for right."""
        return 1 if self is Side.LEFT else -1


class CutKind(enum.Enum):
    """How one curve meets another at an intersection point.

    The kind always describes the first curve relative to the second.
    """

    CROSS_FROM_LEFT = "cross_from_left"
    CROSS_FROM_RIGHT = "cross_from_right"
    TOUCH_LEFT = "touch_left"
    TOUCH_RIGHT = "touch_right"

    @property
    def is_touch(self) -> bool:
        """Whether the curves stay on one side of each other."""
        return self in (CutKind.TOUCH_LEFT, CutKind.TOUCH_RIGHT)


@dataclass(frozen=True)
class CutEvent:
    """An intersection of two curves, seen from the first one."""

    t_self: float
    t_other: float
    kind: CutKind
    point: Point


@dataclass(frozen=True)
class Support:
    """A generalized circle: a circle or a line, oriented.

    Stored by a point on it, the unit tangent there and the signed
    curvature (positive turns left). The side value

        f(x) = <n, x - anchor> - k/2 |x - anchor|^2

    is positive exactly on the left, and stays well conditioned as the
    curvature goes to zero.
    """

    anchor: Point
    tangent: Direction
    curvature: float

    @property
    def is_line(self) -> bool:
        """Whether the curvature is exactly zero."""
        return self.curvature == 0.0

    @property
    def normal(self) -> Direction:
        """Left normal at the anchor."""
        return self.tangent.left_normal()

    def value(self, x: Point) -> float:
        """The side value f(x)."""
        d = x - self.anchor
        return self.normal.dot(d) - 0.5 * self.curvature * d.dot(d)

    def gradient(self, x: Point) -> Point:
        """Gradient of the side value."""
        return self.normal.as_point() - (x - self.anchor) * self.curvature

    def signed_distance(self, x: Point) -> float:
        """Distance to the support, positive on the left."""
        f = self.value(x)
        root = math.sqrt(max(0.0, 1.0 - 2.0 * self.curvature * f))
        return 2.0 * f / (1.0 + root)

    def project(self, x: Point) -> Point:
        """Closest point on the support."""
        g = self.gradient(x)
        gn = g.norm()
        if gn == 0.0:
            # Center of a circle: every support point is closest.
            return self.anchor
        return x - g * (self.signed_distance(x) / gn)

    @cached_property
    def center(self) -> Point:
        """Center of a circular support."""
        if self.is_line:
            raise ValueError("A line has no center.")
        return self.anchor + self.normal.as_point() / self.curvature

    @cached_property
    def radius(self) -> float:
        """Radius of a circular support, inf for a line."""
        if self.is_line:
            return math.inf
        return 1.0 / abs(self.curvature)

    def tangent_at(self, x: Point) -> Direction:
        """Oriented unit tangent at a point on (or near) the support."""
        g = self.gradient(x)
        # The gradient is the left normal, so the tangent is it rotated by -90.
        return Direction.of(Point(g.y, -g.x))


@dataclass(frozen=True)
class ArcSegment:
    """A circular arc or line segment in bulge form.

    The bulge is tan(sweep / 4), signed, positive for counterclockwise
    arcs and zero for line segments. The parameter t in [0, 1] runs at
    constant speed from start to end.
    """

    start: Point
    end: Point
    bulge: float = 0.0

    def __post_init__(self) -> None:
        if self.start == self.end:
            raise ValueError(f"Arc endpoints coincide at {self.start}.")
        if not math.isfinite(self.bulge):
            raise ValueError(f"Arc bulge must be finite, got {self.bulge}.")

    @cached_property
    def chord(self) -> Point:
        """end - start."""
        return self.end - self.start

    @cached_property
    def chord_length(self) -> float:
        """Distance from start to end."""
        return self.chord.norm()

    @cached_property
    def chord_direction(self) -> Direction:
        """Unit vector from start to end."""
        return Direction.of(self.chord)

    @cached_property
    def sweep(self) -> float:
        """Signed turning angle from start to end."""
        if self.is_line():
            return 0.0
        return 4.0 * math.atan(self.bulge)

    @cached_property
    def curvature(self) -> float:
        """Signed curvature, positive for counterclockwise arcs."""
        if self.is_line():
            return 0.0
        b = self.bulge
        return 4.0 * b / ((1.0 + b * b) * self.chord_length)

    def is_line(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        """Whether the segment is treated as straight."""
        return abs(self.bulge) <= tol.eps_bulge

    @cached_property
    def length(self) -> float:
        """Arc length."""
        half = 0.5 * self.sweep
        if abs(half) < _SMALL_SWEEP:
            return self.chord_length
        return self.chord_length * half / math.sin(half)

    @cached_property
    def support(self) -> Support:
        """The circle or line carrying this segment."""
        return Support(self.start, self.tangent_at(0.0), self.curvature)

    @cached_property
    def center(self) -> Point:
        """Center of the carrying circle."""
        return self.support.center

    @cached_property
    def radius(self) -> float:
        """Radius of the carrying circle, inf for a line."""
        return self.support.radius

    def point_at(self, t: float) -> Point:
        """The point at parameter t."""
        theta = self.sweep
        if abs(theta) < _SMALL_SWEEP:
            ratio = t
        else:
            ratio = math.sin(0.5 * theta * t) / math.sin(0.5 * theta)
        u = self.chord_direction.rotated(-0.5 * theta * (1.0 - t))
        return self.start + u.as_point() * (self.chord_length * ratio)

    def tangent_at(self, t: float) -> Direction:
        """Unit tangent at parameter t."""
        return self.chord_direction.rotated(self.sweep * (t - 0.5))

    def normal_at(self, t: float) -> Direction:
        """Left unit normal at parameter t."""
        return self.tangent_at(t).left_normal()

    def param_of(self, q: Point) -> float:
        """Parameter of a point on the carrying circle or line.

        Points of the support outside the segment map outside [0, 1].
        """
        d = q - self.start
        theta = self.sweep
        if abs(theta) < 1e-6:
            return d.dot(self.chord) / (self.chord_length**2)
        if d.norm() <= 1e-12 * self.chord_length:
            return 0.0
        u0 = self.tangent_at(0.0)
        psi = math.atan2(u0.cross(d), u0.dot(d))
        # Split the complement of the segment halfway, so points just
        # behind the start get small negative parameters.
        if theta > 0 and psi > 0.25 * theta + 0.5 * math.pi:
            psi -= math.pi
        elif theta < 0 and psi < 0.25 * theta - 0.5 * math.pi:
            psi += math.pi
        return 2.0 * psi / theta

    def side_value(self, q: Point) -> float:
        """Side value of q against the carrying circle or line."""
        return self.support.value(q)

    def signed_distance(self, q: Point) -> float:
        """Distance from q to the carrying circle or line, positive on the left."""
        return self.support.signed_distance(q)

    def distance_to(self, q: Point) -> float:
        """Unsigned distance from q to the segment itself."""
        foot = self.support.project(q)
        t = self.param_of(foot)
        if 0.0 <= t <= 1.0:
            return q.dist(foot)
        return min(q.dist(self.start), q.dist(self.end))

    def reversed(self) -> ArcSegment:
        """The same point set traversed from end to start."""
        return ArcSegment(self.end, self.start, -self.bulge)

    def sub_arc(self, t0: float, t1: float) -> ArcSegment:
        """The piece between two parameters, t0 < t1."""
        return ArcSegment(
            self.point_at(t0),
            self.point_at(t1),
            math.tan(self.sweep * (t1 - t0) / 4.0),
        )

    def to_json(self) -> dict[str, Any]:
        """Serialize as {"start": [x, y], "end": [x, y], "bulge": b}."""
        return {
            "start": self.start.to_json(),
            "end": self.end.to_json(),
            "bulge": self.bulge,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> ArcSegment:
        """Parse the output of to_json()."""
        try:
            return cls(
                Point.from_json(obj["start"]),
                Point.from_json(obj["end"]),
                float(obj.get("bulge", 0.0)),
            )
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed arc segment {obj!r}.") from e
