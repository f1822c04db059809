from __future__ import annotations

import logging

from django.db import transaction

from localization.choices import ClusteringMethod, ErrorKind, RunStatus
from localization.models import Network, SweepResult, SweepRun

from .exceptions import LocalizationError
from .geometry import Point2
from .harness import SweepConfig, SweepRecord, run_sweep
from .network import NetworkConfig, NetworkTopology, build_topology, mean_connectivity

logger = logging.getLogger(__name__)


def store_network(topology: NetworkTopology, name: str = "") -> Network:
    config = topology.config
    return Network.objects.create(
        name=name,
        width=config.width,
        height=config.height,
        node_count=config.node_count,
        radius=config.radius,
        seed=config.seed,
        mean_connectivity=mean_connectivity(topology),
        positions=[[p.x, p.y] for p in topology.positions],
    )


def network_topology(network: Network) -> NetworkTopology:
    config = NetworkConfig(
        width=network.width,
        height=network.height,
        node_count=network.node_count,
        radius=network.radius,
        seed=network.seed,
    )
    return build_topology(config, [Point2(float(x), float(y)) for x, y in network.positions])


def sweep_config_for(run: SweepRun) -> SweepConfig:
    return SweepConfig(
        network=network_topology(run.network),
        e_start=run.e_start,
        e_step=run.e_step,
        steps=run.steps,
        error_model=ErrorKind(run.error_model),
        max_range=run.max_range,
        max_retries=run.max_retries,
        seed=run.seed,
        methods=tuple(ClusteringMethod(m) for m in run.methods),
        strict_pairs=run.strict_pairs,
    )


def store_sweep_run(network: Network, cfg: SweepConfig) -> SweepRun:
    return SweepRun.objects.create(
        network=network,
        error_model=ErrorKind(cfg.error_model).value,
        e_start=cfg.e_start,
        e_step=cfg.e_step,
        steps=cfg.steps,
        max_range=cfg.max_range,
        max_retries=cfg.max_retries,
        seed=cfg.seed,
        methods=[ClusteringMethod(m).value for m in cfg.methods],
        strict_pairs=cfg.strict_pairs,
    )


def records_of(run: SweepRun) -> list[SweepRecord]:
    return [
        SweepRecord(
            e=row.e,
            method=ClusteringMethod(row.method),
            total_error=row.total_error,
            total_error_pct_range=row.total_error_pct_range,
            localized_count=row.localized_count,
            node_count=row.node_count,
        )
        for row in run.records.all()
    ]


class SweepRunExecutor:
    """Выполнение сохранённой развёртки и запись её результатов"""

    def __init__(self, run: SweepRun):
        self.run = run

    @transaction.atomic
    def store_records(self, records: list[SweepRecord]) -> int:
        self.run.records.all().delete()
        SweepResult.objects.bulk_create(
            SweepResult(
                run=self.run,
                e=record.e,
                method=ClusteringMethod(record.method).value,
                total_error=record.total_error,
                total_error_pct_range=record.total_error_pct_range,
                localized_count=record.localized_count,
                node_count=record.node_count,
            )
            for record in records
        )
        return len(records)

    def _set_status(self, status: str, error_message: str = "") -> None:
        self.run.status = status
        self.run.error_message = error_message
        self.run.save(update_fields=["status", "error_message", "updated_at"])

    def execute(self) -> SweepRun:
        self._set_status(RunStatus.RUNNING)
        try:
            records = run_sweep(sweep_config_for(self.run))
        except (LocalizationError, ValueError) as exc:
            logger.exception("Sweep run #%s failed", self.run.pk)
            self._set_status(RunStatus.FAILED, str(exc))
            return self.run
        return self.complete(records)

    def complete(self, records: list[SweepRecord]) -> SweepRun:
        stored = self.store_records(records)
        self._set_status(RunStatus.COMPLETED)
        logger.info("Sweep run #%s completed with %d records", self.run.pk, stored)
        return self.run
