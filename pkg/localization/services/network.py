"""Случайные сети: равномерное размещение узлов и связность Unit Disc Graph."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from statistics import fmean
from typing import Iterable, Sequence

import numpy as np

from .exceptions import TopologyError
from .geometry import Point2

logger = logging.getLogger(__name__)

POSITIONS_HEADER = ("node_id", "x", "y")


@dataclass(frozen=True)
class ReferenceNetwork:
    literal_radius: float
    mean_connectivity: float
    width: float = 1.0
    height: float = 1.0
    node_count: int = 100


# Сети из экспериментов: 1x1, 100 узлов, радиус и средняя связность.
REFERENCE_NETWORKS = {
    "network1": ReferenceNetwork(0.04, 4.582),
    "network2": ReferenceNetwork(0.05, 7.199),
    "network3": ReferenceNetwork(0.06, 10.394),
    "network4": ReferenceNetwork(0.07, 13.96),
}


@dataclass(frozen=True)
class NetworkConfig:
    width: float
    height: float
    node_count: int
    radius: float
    seed: int = 0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("Network area must have positive width and height.")
        if self.node_count < 1:
            raise ValueError("A network needs at least one node.")
        if not self.radius > 0:
            raise ValueError("Communication radius must be positive.")


@dataclass(frozen=True)
class AnchorLink:
    """Сосед узла, выступающий якорем: его номер, позиция и истинное расстояние."""

    anchor: int
    position: Point2
    distance: float


@dataclass(frozen=True)
class NetworkTopology:
    config: NetworkConfig
    positions: tuple[Point2, ...]
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def node_count(self) -> int:
        return len(self.positions)

    @property
    def edge_count(self) -> int:
        return sum(len(neighbours) for neighbours in self.adjacency) // 2


def random_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _udg_adjacency(coordinates: np.ndarray, radius: float) -> tuple[tuple[int, ...], ...]:
    delta = coordinates[:, None, :] - coordinates[None, :, :]
    linked = np.hypot(delta[..., 0], delta[..., 1]) <= radius
    np.fill_diagonal(linked, False)
    return tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in linked)


def build_topology(config: NetworkConfig, positions: Sequence[Point2]) -> NetworkTopology:
    if len(positions) != config.node_count:
        raise TopologyError(f"Expected {config.node_count} positions, got {len(positions)}.")
    for index, point in enumerate(positions):
        if not (0 <= point.x <= config.width and 0 <= point.y <= config.height):
            raise TopologyError(f"Node {index} at ({point.x}, {point.y}) lies outside the network area.")
    coordinates = np.array([(p.x, p.y) for p in positions], dtype=float).reshape(-1, 2)
    return NetworkTopology(config, tuple(positions), _udg_adjacency(coordinates, config.radius))


def generate(config: NetworkConfig) -> NetworkTopology:
    """Узлы i.i.d. равномерно в прямоугольнике.

    Генератор PCG64 с SeedSequence(seed); для каждого узла по очереди
    берутся x = width·U[0,1) и y = height·U[0,1).
    """
    rng = random_generator(config.seed)
    coordinates = rng.random((config.node_count, 2)) * np.array([config.width, config.height])
    positions = tuple(Point2(float(x), float(y)) for x, y in coordinates)
    topology = NetworkTopology(config, positions, _udg_adjacency(coordinates, config.radius))
    logger.debug(
        "Generated network: %d nodes, radius %.6g, seed %d, mean connectivity %.4f",
        config.node_count,
        config.radius,
        config.seed,
        mean_connectivity(topology),
    )
    return topology


def mean_connectivity(t: NetworkTopology) -> float:
    return sum(len(neighbours) for neighbours in t.adjacency) / t.node_count


def anchors_of(t: NetworkTopology, node: int) -> list[AnchorLink]:
    if not 0 <= node < t.node_count:
        raise TopologyError(f"Node {node} does not exist.")
    origin = t.positions[node]
    return [
        AnchorLink(anchor=neighbour, position=t.positions[neighbour], distance=origin.distance_to(t.positions[neighbour]))
        for neighbour in t.adjacency[node]
    ]


def calibrate_radius(
    width: float,
    height: float,
    node_count: int,
    target_mean: float,
    seeds: Iterable[int] = range(16),
    tolerance: float = 1e-3,
    max_iterations: int = 60,
) -> float:
    """Радиус, при котором средняя связность по seeds совпадает с target_mean."""
    if not 0 < target_mean < node_count - 1:
        raise ValueError(f"Target mean connectivity must lie in (0, {node_count - 1}).")
    rng_seeds = list(seeds)
    samples = [random_generator(seed).random((node_count, 2)) * np.array([width, height]) for seed in rng_seeds]

    def average_degree(radius: float) -> float:
        return fmean(
            sum(len(neighbours) for neighbours in _udg_adjacency(coordinates, radius)) / node_count
            for coordinates in samples
        )

    low, high = 0.0, math.hypot(width, height)
    radius = high / 2
    for _ in range(max_iterations):
        radius = (low + high) / 2
        mean = average_degree(radius)
        if abs(mean - target_mean) <= tolerance:
            break
        if mean < target_mean:
            low = radius
        else:
            high = radius
    logger.info(
        "Calibrated radius %.6g for target mean connectivity %.4g (%d nodes, %d seeds)",
        radius,
        target_mean,
        node_count,
        len(rng_seeds),
    )
    return radius


def export_topology(t: NetworkTopology, directory: Path, stem: str = "topology") -> tuple[Path, Path]:
    """Пишет <stem>.json (конфигурация) и <stem>.csv (позиции узлов)."""
    csv_path = directory / f"{stem}.csv"
    json_path = directory / f"{stem}.json"
    with open(csv_path, "w", encoding="utf-8", newline="") as sink:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(POSITIONS_HEADER)
        for node, point in enumerate(t.positions):
            writer.writerow((node, repr(point.x), repr(point.y)))
    header = {
        "config": asdict(t.config),
        "mean_connectivity": mean_connectivity(t),
        "positions": csv_path.name,
    }
    with open(json_path, "w", encoding="utf-8") as sink:
        json.dump(header, sink, indent=2, sort_keys=True)
        sink.write("\n")
    return json_path, csv_path


def read_positions(lines: Iterable[str]) -> list[Point2]:
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or tuple(header) != POSITIONS_HEADER:
        raise TopologyError(f"Positions file must start with {','.join(POSITIONS_HEADER)}.")
    positions = []
    for row in reader:
        if not row:
            continue
        try:
            node, x, y = int(row[0]), float(row[1]), float(row[2])
            point = Point2(x, y)
        except (IndexError, ValueError):
            raise TopologyError(f"Malformed positions row at line {reader.line_num}.")
        if node != len(positions):
            raise TopologyError(f"Node ids must be consecutive from 0, got {node} at line {reader.line_num}.")
        positions.append(point)
    return positions


def import_topology(json_path: Path) -> NetworkTopology:
    json_path = Path(json_path)
    with open(json_path, encoding="utf-8") as source:
        try:
            header = json.load(source)
            config = NetworkConfig(**header["config"])
            positions_name = header["positions"]
        except (KeyError, TypeError, ValueError) as exc:
            raise TopologyError(f"Invalid topology header {json_path}: {exc}")
    with open(json_path.parent / positions_name, encoding="utf-8", newline="") as source:
        positions = read_positions(source)
    return build_topology(config, positions)
