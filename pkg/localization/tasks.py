import logging
from dataclasses import asdict, replace

from celery import group, shared_task
from django.conf import settings

from .choices import ClusteringMethod, ErrorKind
from .models import SweepRun
from .services.experiments import SweepRunExecutor
from .services.geometry import Point2
from .services.harness import NodeResult, SweepConfig, SweepOutcome, SweepRecord, run_sweep_detailed
from .services.network import NetworkConfig, NetworkTopology, build_topology

logger = logging.getLogger(__name__)


def sweep_payload(cfg: SweepConfig, topology: NetworkTopology) -> dict:
    """JSON-совместимое описание развёртки для передачи воркерам."""
    return {
        "network": asdict(topology.config),
        "positions": [[p.x, p.y] for p in topology.positions],
        "sweep": {
            "e_start": cfg.e_start,
            "e_step": cfg.e_step,
            "steps": cfg.steps,
            "error_model": ErrorKind(cfg.error_model).value,
            "max_range": cfg.max_range,
            "max_retries": cfg.max_retries,
            "seed": cfg.seed,
            "methods": [ClusteringMethod(m).value for m in cfg.methods],
            "strict_pairs": cfg.strict_pairs,
        },
    }


def _sweep_from_payload(payload: dict) -> tuple[SweepConfig, NetworkTopology]:
    topology = build_topology(
        NetworkConfig(**payload["network"]),
        [Point2(x, y) for x, y in payload["positions"]],
    )
    options = dict(payload["sweep"])
    options["error_model"] = ErrorKind(options["error_model"])
    options["methods"] = tuple(ClusteringMethod(m) for m in options["methods"])
    return SweepConfig(network=topology, **options), topology


def _outcome_to_payload(outcome: SweepOutcome) -> dict:
    return {
        "records": [
            [r.e, r.method.value, r.total_error, r.total_error_pct_range, r.localized_count, r.node_count]
            for r in outcome.records
        ],
        "details": [
            [
                d.node,
                d.method.value,
                None if d.estimated is None else [d.estimated.x, d.estimated.y],
                d.error_distance,
                d.attempts,
                d.e,
            ]
            for d in outcome.details
        ],
    }


def _outcome_from_payload(payload: dict) -> SweepOutcome:
    records = [
        SweepRecord(e, ClusteringMethod(method), total, pct, localized, count)
        for e, method, total, pct, localized, count in payload["records"]
    ]
    details = [
        NodeResult(node, ClusteringMethod(method), None if xy is None else Point2(*xy), error, attempts, e)
        for node, method, xy, error, attempts, e in payload["details"]
    ]
    return SweepOutcome(records, details)


@shared_task
def evaluate_sweep_steps(payload: dict, e_indices: list[int]) -> dict:
    cfg, topology = _sweep_from_payload(payload)
    return _outcome_to_payload(run_sweep_detailed(cfg, topology, e_indices))


@shared_task
def execute_sweep_run(run_id: int) -> str:
    run = SweepRun.objects.select_related("network").get(pk=run_id)
    return SweepRunExecutor(run).execute().status


def dispatch_sweep(cfg: SweepConfig, topology: NetworkTopology, chunk_size: int | None = None) -> SweepOutcome:
    """Разбивает шаги e на группы задач Celery и собирает результат в исходном порядке."""
    chunk_size = chunk_size or settings.WSN_SWEEP_CHUNK_SIZE
    indices = list(cfg.e_indices)
    chunks = [indices[start:start + chunk_size] for start in range(0, len(indices), chunk_size)]
    payload = sweep_payload(replace(cfg, network=topology.config), topology)
    logger.info("Dispatching sweep: %d e-steps in %d tasks", len(indices), len(chunks))
    results = group(evaluate_sweep_steps.s(payload, chunk) for chunk in chunks).apply_async().join()
    outcome = SweepOutcome()
    for part in results:
        outcome.extend(_outcome_from_payload(part))
    outcome.sort()
    return outcome
