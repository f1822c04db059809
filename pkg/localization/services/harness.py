"""Протокол оценки: развёртка параметра ошибки e, локализация всех узлов, агрегирование."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from math import fsum
from typing import IO, Callable, Iterable, Sequence

import numpy as np

from localization.choices import ClusteringMethod, ErrorKind

from .clustering import Cluster, PairScan, build_cluster, candidate_pairs, estimate_position
from .exceptions import EmptyCluster, TooFewAnchors
from .geometry import Circle, Point2
from .network import AnchorLink, NetworkConfig, NetworkTopology, anchors_of, generate
from .ranging import ErrorModel, apply_error

logger = logging.getLogger(__name__)

DEFAULT_MAX_RETRIES = 50
RESULTS_HEADER = ("e", "method", "total_error", "total_error_pct_range", "localized_count", "node_count")
DETAILS_HEADER = ("e", "method", "node", "attempts", "error_distance")
PLOT_HEADER = ("e", "total_error_pct_range")
ALL_METHODS = (ClusteringMethod.M1, ClusteringMethod.M2, ClusteringMethod.M3)

StreamFactory = Callable[[int], np.random.Generator]


@dataclass(frozen=True)
class SweepConfig:
    network: NetworkConfig | NetworkTopology
    e_start: float = 0.0
    e_step: float = 0.001
    steps: int = 200
    error_model: ErrorKind = ErrorKind.RANDOM
    max_range: float | None = None
    max_retries: int = DEFAULT_MAX_RETRIES
    seed: int = 0
    methods: tuple[ClusteringMethod, ...] = ALL_METHODS
    strict_pairs: bool = False

    def __post_init__(self):
        if self.e_start < 0:
            raise ValueError("e_start must be non-negative.")
        if not self.e_step > 0:
            raise ValueError("e_step must be positive.")
        if self.steps < 1:
            raise ValueError("steps must be at least 1.")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative.")
        if not self.methods:
            raise ValueError("At least one clustering method is required.")
        if self.e_value(self.steps) >= 1:
            raise ValueError("The last swept e must stay below 1.")

    def e_value(self, e_index: int) -> float:
        return self.e_start + e_index * self.e_step

    @property
    def e_indices(self) -> range:
        # обе границы входят: steps + 1 значений
        return range(self.steps + 1)


@dataclass(frozen=True)
class NodeResult:
    node: int
    method: ClusteringMethod
    estimated: Point2 | None
    error_distance: float | None
    attempts: int
    e: float = 0.0

    @property
    def localized(self) -> bool:
        return self.estimated is not None


@dataclass(frozen=True)
class SweepRecord:
    e: float
    method: ClusteringMethod
    total_error: float | None
    total_error_pct_range: float | None
    localized_count: int
    node_count: int


@dataclass
class SweepOutcome:
    records: list[SweepRecord] = field(default_factory=list)
    details: list[NodeResult] = field(default_factory=list)

    def extend(self, other: SweepOutcome) -> None:
        self.records.extend(other.records)
        self.details.extend(other.details)

    def sort(self) -> None:
        self.records.sort(key=lambda r: (r.e, ClusteringMethod(r.method).value))
        self.details.sort(key=lambda d: (d.e, ClusteringMethod(d.method).value, d.node))


@dataclass(frozen=True)
class NodeTrace:
    """Всё, что нужно для перерисовки одного узла: окружности, точки, кластер, оценка."""

    node: int
    true_position: Point2
    circles: tuple[Circle, ...]
    scan: PairScan
    cluster: Cluster
    estimate: Point2 | None
    attempts: int


def substream(seed: int, e_index: int, node: int, attempt: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed, spawn_key=(e_index, node, attempt))
    return np.random.Generator(np.random.PCG64(sequence))


def resolve_topology(network: NetworkConfig | NetworkTopology) -> NetworkTopology:
    if isinstance(network, NetworkTopology):
        return network
    return generate(network)


def error_model_for(cfg: SweepConfig, topology: NetworkTopology, e: float) -> ErrorModel:
    max_range = cfg.max_range if cfg.max_range is not None else topology.config.radius
    return ErrorModel(kind=ErrorKind(cfg.error_model), e=e, max_range=max_range)


def _draw_circles(anchors: Sequence[AnchorLink], model: ErrorModel, rng: np.random.Generator) -> list[Circle]:
    return [Circle(link.position, apply_error(model, link.distance, rng)) for link in anchors]


def localize_node(
    node: int,
    true_position: Point2,
    anchors: Sequence[AnchorLink],
    model: ErrorModel,
    method: ClusteringMethod,
    streams: StreamFactory,
    max_retries: int = DEFAULT_MAX_RETRIES,
    strict_pairs: bool = False,
) -> NodeResult:
    method = ClusteringMethod(method)
    if len(anchors) < 3:
        return NodeResult(node, method, None, None, attempts=0, e=model.e)

    attempts = 0
    for attempt in range(max_retries + 1):
        attempts = attempt + 1
        circles = _draw_circles(anchors, model, streams(attempt))
        try:
            estimate = estimate_position(build_cluster(method, circles, strict_pairs))
        except EmptyCluster:
            logger.debug("Node %d, %s, e=%g: empty cluster on attempt %d", node, method, model.e, attempts)
            if model.is_deterministic:
                # повторная выборка даст те же окружности
                break
            continue
        return NodeResult(node, method, estimate, estimate.distance_to(true_position), attempts, e=model.e)
    return NodeResult(node, method, None, None, attempts, e=model.e)


def trace_node(
    topology: NetworkTopology,
    node: int,
    model: ErrorModel,
    method: ClusteringMethod,
    seed: int = 0,
    e_index: int = 0,
    max_retries: int = DEFAULT_MAX_RETRIES,
    strict_pairs: bool = False,
) -> NodeTrace:
    anchors = anchors_of(topology, node)
    if len(anchors) < 3:
        raise TooFewAnchors(len(anchors))
    method = ClusteringMethod(method)
    trace = None
    for attempt in range(max_retries + 1):
        circles = tuple(_draw_circles(anchors, model, substream(seed, e_index, node, attempt)))
        cluster = build_cluster(method, circles, strict_pairs)
        estimate = None if cluster.is_empty else estimate_position(cluster)
        trace = NodeTrace(node, topology.positions[node], circles, candidate_pairs(circles), cluster, estimate, attempt + 1)
        if estimate is not None or model.is_deterministic:
            break
    return trace


def aggregate(
    e: float,
    method: ClusteringMethod,
    results: Iterable[NodeResult],
    node_count: int,
    radius: float,
) -> SweepRecord:
    """Total Error = сумма ошибок / число локализованных узлов; %range: доля от радиуса связи."""
    errors = [r.error_distance for r in results if r.localized]
    if not errors:
        return SweepRecord(e, method, None, None, 0, node_count)
    total_error = fsum(errors) / len(errors)
    return SweepRecord(e, method, total_error, 100 * total_error / radius, len(errors), node_count)


def evaluate_step(cfg: SweepConfig, topology: NetworkTopology, e_index: int) -> SweepOutcome:
    e = cfg.e_value(e_index)
    model = error_model_for(cfg, topology, e)
    anchors = [anchors_of(topology, node) for node in range(topology.node_count)]
    outcome = SweepOutcome()
    for method in cfg.methods:
        method = ClusteringMethod(method)
        results = [
            localize_node(
                node,
                topology.positions[node],
                anchors[node],
                model,
                method,
                streams=lambda attempt, node=node: substream(cfg.seed, e_index, node, attempt),
                max_retries=cfg.max_retries,
                strict_pairs=cfg.strict_pairs,
            )
            for node in range(topology.node_count)
        ]
        outcome.records.append(aggregate(e, method, results, topology.node_count, topology.config.radius))
        outcome.details.extend(results)
    logger.debug("Evaluated e=%g (index %d) for %d methods", e, e_index, len(cfg.methods))
    return outcome


def run_sweep_detailed(
    cfg: SweepConfig,
    topology: NetworkTopology | None = None,
    e_indices: Iterable[int] | None = None,
) -> SweepOutcome:
    topology = topology or resolve_topology(cfg.network)
    outcome = SweepOutcome()
    for e_index in e_indices if e_indices is not None else cfg.e_indices:
        outcome.extend(evaluate_step(cfg, topology, e_index))
    outcome.sort()
    logger.info(
        "Sweep finished: %d records, %d nodes, seed %d",
        len(outcome.records),
        topology.node_count,
        cfg.seed,
    )
    return outcome


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    return run_sweep_detailed(cfg).records


def _format(value: float | None) -> str:
    return "" if value is None else f"{value:.9g}"


def emit_results(records: Iterable[SweepRecord], sink: IO[str]) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for record in sorted(records, key=lambda r: (r.e, ClusteringMethod(r.method).value)):
        writer.writerow(
            (
                _format(record.e),
                ClusteringMethod(record.method).value,
                _format(record.total_error),
                _format(record.total_error_pct_range),
                record.localized_count,
                record.node_count,
            )
        )


def emit_plot_data(records: Iterable[SweepRecord], method: ClusteringMethod, sink: IO[str]) -> None:
    """Двухколоночный файл (e, %range) одного метода для внешних построителей графиков."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(PLOT_HEADER)
    for record in sorted(records, key=lambda r: r.e):
        if record.method == method:
            writer.writerow((_format(record.e), _format(record.total_error_pct_range)))


def emit_node_results(details: Iterable[NodeResult], sink: IO[str]) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(DETAILS_HEADER)
    for result in details:
        writer.writerow(
            (_format(result.e), ClusteringMethod(result.method).value, result.node, result.attempts, _format(result.error_distance))
        )
