"""Кластеризация точек пересечения окружностей (методы 1–3) и итоговая оценка позиции."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from localization.choices import ClusteringMethod

from .exceptions import TooFewAnchors
from .geometry import (
    Circle,
    NoIntersection,
    Point2,
    centroid,
    circle_intersections,
    geometry_tolerance,
    point_in_circle,
)

MIN_CIRCLES = 3


@dataclass(frozen=True)
class AnchorObservation:
    anchor_position: Point2
    estimated_distance: float

    def __post_init__(self):
        if not self.estimated_distance >= 0:
            raise ValueError(f"Estimated distance must be non-negative, got {self.estimated_distance}.")

    def as_circle(self) -> Circle:
        return Circle(self.anchor_position, self.estimated_distance)


@dataclass(frozen=True)
class CandidatePair:
    circle_i: int
    circle_j: int
    points: tuple[Point2, ...]

    def __post_init__(self):
        if not self.circle_i < self.circle_j:
            raise ValueError("Candidate pair indices must satisfy i < j.")
        if len(self.points) not in (1, 2):
            raise ValueError("A candidate pair carries one or two points.")

    @property
    def is_tangent(self) -> bool:
        return len(self.points) == 1


@dataclass(frozen=True)
class FavourTally:
    fp_a: int = 0
    fp_b: int = 0


@dataclass(frozen=True)
class Cluster:
    points: tuple[Point2, ...]
    method: ClusteringMethod
    sources: tuple[tuple[int, int], ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.points


@dataclass(frozen=True)
class PairScan:
    """Все пары окружностей с точками пересечения; missing: число пар без пересечения."""

    pairs: tuple[CandidatePair, ...]
    missing: int


def _require_circles(circles: Sequence[Circle]) -> None:
    if len(circles) < MIN_CIRCLES:
        raise TooFewAnchors(len(circles))


def candidate_pairs(circles: Sequence[Circle]) -> PairScan:
    pairs = []
    missing = 0
    for i in range(len(circles)):
        for j in range(i + 1, len(circles)):
            result = circle_intersections(circles[i], circles[j])
            if isinstance(result, NoIntersection):
                missing += 1
            elif result.points:
                pairs.append(CandidatePair(i, j, result.points))
    return PairScan(tuple(pairs), missing)


def favour_points(pair: CandidatePair, circles: Sequence[Circle]) -> FavourTally:
    _require_circles(circles)
    if pair.is_tangent:
        raise ValueError("Favour points are awarded between two intersection points.")
    point_a, point_b = pair.points
    fp_a = fp_b = 0
    for k, circle in enumerate(circles):
        if k in (pair.circle_i, pair.circle_j):
            continue
        dist_a = point_a.distance_to(circle.center)
        dist_b = point_b.distance_to(circle.center)
        if abs(dist_a - dist_b) <= geometry_tolerance(dist_a, dist_b):
            continue
        if dist_a < dist_b:
            fp_a += 1
        else:
            fp_b += 1
    return FavourTally(fp_a, fp_b)


def _favour_winner(pair: CandidatePair, circles: Sequence[Circle], threshold: int) -> Point2 | None:
    """Точка пары, набравшая >= threshold очков при нуле у соперника."""
    if pair.is_tangent:
        # одиночной точке без соперника достаются все n − 2 очка
        return pair.points[0] if len(circles) - 2 >= threshold else None
    tally = favour_points(pair, circles)
    if tally.fp_a >= threshold and tally.fp_b == 0:
        return pair.points[0]
    if tally.fp_b >= threshold and tally.fp_a == 0:
        return pair.points[1]
    return None


def _favour_cluster(
    circles: Sequence[Circle],
    method: ClusteringMethod,
    threshold: int,
    strict_pairs: bool,
) -> Cluster:
    _require_circles(circles)
    scan = candidate_pairs(circles)
    if strict_pairs and scan.missing:
        return Cluster((), method)
    points, sources = [], []
    for pair in scan.pairs:
        winner = _favour_winner(pair, circles, threshold)
        if winner is not None:
            points.append(winner)
            sources.append((pair.circle_i, pair.circle_j))
    return Cluster(tuple(points), method, tuple(sources))


def method1(circles: Sequence[Circle], strict_pairs: bool = False) -> Cluster:
    """Точка входит в кластер, если у неё есть очки, а у второй точки пары их нет.

    strict_pairs=True включает буквальное правило: при отсутствии пересечения хотя бы
    у одной пары кластер пуст.
    """
    return _favour_cluster(circles, ClusteringMethod.M1, 1, strict_pairs)


def method2(circles: Sequence[Circle]) -> Cluster:
    """Точка входит в кластер, если лежит внутри всех остальных окружностей."""
    _require_circles(circles)
    points, sources = [], []
    for pair in candidate_pairs(circles).pairs:
        others = [c for k, c in enumerate(circles) if k not in (pair.circle_i, pair.circle_j)]
        for point in pair.points:
            if all(point_in_circle(point, c, geometry_tolerance(c.radius)) for c in others):
                points.append(point)
                sources.append((pair.circle_i, pair.circle_j))
    return Cluster(tuple(points), ClusteringMethod.M2, tuple(sources))


def method3(circles: Sequence[Circle]) -> Cluster:
    """Точка входит в кластер, только если набрала n − 2 очков."""
    return _favour_cluster(circles, ClusteringMethod.M3, len(circles) - 2, strict_pairs=False)


def build_cluster(
    method: ClusteringMethod | str,
    circles: Sequence[Circle],
    strict_pairs: bool = False,
) -> Cluster:
    method = ClusteringMethod(method)
    if method == ClusteringMethod.M1:
        return method1(circles, strict_pairs=strict_pairs)
    if method == ClusteringMethod.M2:
        return method2(circles)
    return method3(circles)


def estimate_position(cluster: Cluster) -> Point2:
    return centroid(cluster.points)
