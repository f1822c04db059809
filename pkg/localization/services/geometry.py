"""Плоская геометрия: пересечение окружностей, принадлежность точки кругу, центроид."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Union

from .exceptions import EmptyCluster

RELATIVE_TOLERANCE = 1e-9


def geometry_tolerance(*magnitudes: float) -> float:
    """τ_geom = 1e-9 · max(1, |величины|)."""
    return RELATIVE_TOLERANCE * max(1.0, *(abs(value) for value in magnitudes))


@dataclass(frozen=True, slots=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Point coordinates must be finite, got ({self.x}, {self.y}).")

    def distance_to(self, other: Point2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, slots=True)
class Circle:
    center: Point2
    radius: float

    def __post_init__(self):
        if not math.isfinite(self.radius) or self.radius < 0:
            raise ValueError(f"Radius must be finite and non-negative, got {self.radius}.")


@dataclass(frozen=True, slots=True)
class NoIntersection:
    @property
    def points(self) -> tuple[Point2, ...]:
        return ()


@dataclass(frozen=True, slots=True)
class Coincident:
    @property
    def points(self) -> tuple[Point2, ...]:
        return ()


@dataclass(frozen=True, slots=True)
class Tangent:
    point: Point2

    @property
    def points(self) -> tuple[Point2, ...]:
        return (self.point,)


@dataclass(frozen=True, slots=True)
class TwoPoints:
    first: Point2
    second: Point2

    @property
    def points(self) -> tuple[Point2, ...]:
        return (self.first, self.second)


IntersectionResult = Union[NoIntersection, Tangent, TwoPoints, Coincident]

NO_INTERSECTION = NoIntersection()
COINCIDENT = Coincident()


def circle_intersections(a: Circle, b: Circle) -> IntersectionResult:
    ra, rb = a.radius, b.radius
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    d = math.hypot(dx, dy)
    tol = geometry_tolerance(ra, rb, d)

    if d <= tol:
        # концентрические окружности: либо совпадают, либо не пересекаются
        return COINCIDENT if abs(ra - rb) <= tol else NO_INTERSECTION
    if d > ra + rb + tol or d < abs(ra - rb) - tol:
        return NO_INTERSECTION

    ux, uy = dx / d, dy / d
    # расстояние от центра a до хорды вдоль линии центров
    along = (d * d + ra * ra - rb * rb) / (2 * d)
    base = Point2(a.center.x + along * ux, a.center.y + along * uy)

    if abs(d - (ra + rb)) <= tol or abs(d - abs(ra - rb)) <= tol:
        return Tangent(base)

    half_chord = math.sqrt(max(ra * ra - along * along, 0.0))
    if half_chord == 0.0:
        return Tangent(base)
    return TwoPoints(
        Point2(base.x + half_chord * uy, base.y - half_chord * ux),
        Point2(base.x - half_chord * uy, base.y + half_chord * ux),
    )


def point_in_circle(p: Point2, c: Circle, eps: float) -> bool:
    """Граница включается: |p − center| ≤ radius + eps."""
    if eps < 0:
        raise ValueError("eps must be non-negative.")
    return p.distance_to(c.center) <= c.radius + eps


def centroid(points: Iterable[Point2]) -> Point2:
    points = list(points)
    if not points:
        raise EmptyCluster("Cannot compute the centroid of an empty point set.")
    return Point2(fmean(p.x for p in points), fmean(p.y for p in points))
