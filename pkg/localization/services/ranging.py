"""Оценка расстояний: модели ошибки и модель логнормального затенения RSSI."""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import IntEnum
from statistics import fmean
from typing import IO, Iterable, Sequence

import numpy as np

from localization.choices import ErrorKind

from .exceptions import InvalidDistance, TraceParseError

logger = logging.getLogger(__name__)

TRACE_HEADER = ("station_id", "location_id", "true_distance", "rssi")
CURVE_HEADER = ("true_distance", "estimated_distance")
MIN_DISTANCE = math.ulp(0.0)


class Sign(IntEnum):
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class ErrorModel:
    kind: ErrorKind
    e: float
    max_range: float = 1.0

    def __post_init__(self):
        if not 0 <= self.e < 1:
            raise ValueError(f"Error parameter e must be in [0, 1), got {self.e}.")
        if not self.max_range > 0:
            raise ValueError(f"max_range must be positive, got {self.max_range}.")

    @property
    def is_deterministic(self) -> bool:
        return self.kind != ErrorKind.RANDOM or self.e == 0


@dataclass(frozen=True)
class ShadowingParams:
    rssi_0: float = -40.0
    d_0: float = 1.0
    n_atten: float = 2.0
    sigma: float = 0.0

    def __post_init__(self):
        if not self.d_0 > 0:
            raise ValueError("d_0 must be positive.")
        if not self.n_atten > 0:
            raise ValueError("n_atten must be positive.")
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative.")


@dataclass(frozen=True)
class RssiSample:
    station_id: str
    location_id: str
    true_distance: float
    rssi: float


def apply_error(
    model: ErrorModel,
    real_dist: float,
    rng: np.random.Generator | None = None,
    sign: Sign = Sign.PLUS,
) -> float:
    if real_dist < 0 or not math.isfinite(real_dist):
        raise InvalidDistance(f"Real distance must be finite and non-negative, got {real_dist}.")
    if model.e == 0:
        return real_dist

    if model.kind == ErrorKind.CONSTANT:
        estimated = real_dist + model.e * model.max_range
    elif model.kind == ErrorKind.LINEAR:
        estimated = real_dist + int(sign) * model.e * real_dist
    elif model.kind == ErrorKind.LOGARITHMIC:
        a = math.log(real_dist) * model.e if real_dist > 0 else 0.0
        estimated = real_dist + a * model.e
    elif model.kind == ErrorKind.RANDOM:
        if rng is None:
            raise ValueError("The random error model needs a random source.")
        magnitude = rng.uniform(0.0, model.e)
        direction = 1 if rng.integers(0, 2) else -1
        estimated = real_dist * (1.0 + direction * magnitude)
    else:
        raise ValueError(f"Unknown error model `{model.kind}`.")
    return max(float(estimated), 0.0)


def error_model_curve(
    model: ErrorModel,
    samples: int,
    rng: np.random.Generator | None = None,
    sign: Sign = Sign.PLUS,
) -> list[tuple[float, float]]:
    """Точки (реальное, оценённое расстояние) на равномерной сетке [0, max_range]."""
    if samples < 2:
        raise ValueError("At least two samples are required.")
    grid = np.linspace(0.0, model.max_range, samples)
    return [(float(real), apply_error(model, float(real), rng, sign)) for real in grid]


def rssi_from_distance(
    params: ShadowingParams,
    d: float,
    noise: np.random.Generator | None = None,
) -> float:
    if not d > 0:
        raise InvalidDistance(f"Distance must be positive, got {d}.")
    rssi = params.rssi_0 - 10 * params.n_atten * math.log10(d / params.d_0)
    if noise is not None and params.sigma > 0:
        rssi += float(noise.normal(0.0, params.sigma))
    return rssi


def distance_from_rssi(params: ShadowingParams, rssi: float) -> float:
    """Обращение модели затенения; показатель считается в логарифмах.

    Расстояние за пределами float даёт InvalidDistance, исчезающе малое прижимается
    к наименьшему положительному float.
    """
    if not math.isfinite(rssi):
        raise InvalidDistance(f"RSSI must be finite, got {rssi}.")
    log_distance = math.log10(params.d_0) + (params.rssi_0 - rssi) / (10 * params.n_atten)
    try:
        distance = 10.0 ** log_distance
    except OverflowError:
        raise InvalidDistance(f"RSSI {rssi} dBm maps to a distance beyond the float range.") from None
    return max(distance, MIN_DISTANCE)


def _require_utf8(row: list[str], line: int) -> None:
    try:
        ",".join(row).encode("utf-8")
    except UnicodeEncodeError:
        raise TraceParseError("invalid UTF-8 byte sequence", line=line) from None


def ingest_rssi_trace(source: IO[bytes]) -> list[RssiSample]:
    """Читает CSV-трассу и усредняет RSSI по каждой паре (станция, точка).

    Неверные байты UTF-8 доходят до строк как суррогаты и отклоняются с номером строки.
    """
    text = io.TextIOWrapper(source, encoding="utf-8", errors="surrogateescape", newline="")
    reader = csv.reader(text)
    try:
        header = next(reader, None)
        if header is None:
            raise TraceParseError("empty trace")
        if tuple(column.strip() for column in header) != TRACE_HEADER:
            raise TraceParseError(f"unexpected header {header!r}", line=reader.line_num)

        groups: dict[tuple[str, str], list[tuple[float, float]]] = defaultdict(list)
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            _require_utf8(row, line)
            if len(row) != len(TRACE_HEADER):
                raise TraceParseError(f"expected {len(TRACE_HEADER)} columns, got {len(row)}", line=line)
            station_id, location_id, raw_distance, raw_rssi = (value.strip() for value in row)
            try:
                true_distance = float(raw_distance)
                rssi = float(raw_rssi)
            except ValueError:
                raise TraceParseError("non-numeric distance or rssi", line=line)
            if not station_id or not location_id:
                raise TraceParseError("empty station or location id", line=line)
            if not math.isfinite(true_distance) or true_distance < 0:
                raise TraceParseError("true_distance must be finite and non-negative", line=line)
            if not math.isfinite(rssi):
                raise TraceParseError("rssi must be finite", line=line)
            groups[(station_id, location_id)].append((true_distance, rssi))
    except csv.Error as exc:
        raise TraceParseError(str(exc), line=reader.line_num) from None
    finally:
        text.detach()

    if not groups:
        raise TraceParseError("empty trace")

    samples = [
        RssiSample(
            station_id=station_id,
            location_id=location_id,
            true_distance=fmean(distance for distance, _ in rows),
            rssi=fmean(rssi for _, rssi in rows),
        )
        for (station_id, location_id), rows in groups.items()
    ]
    logger.info("Ingested RSSI trace: %d station/location groups", len(samples))
    return samples


def synthesize_trace(
    params: ShadowingParams,
    stations: int,
    distances: Sequence[float],
    messages: int,
    rng: np.random.Generator,
) -> list[RssiSample]:
    """Синтетическая трасса: у каждой станции линия точек, по messages замеров в точке."""
    rows = []
    for station in range(stations):
        for index, distance in enumerate(distances):
            for _ in range(messages):
                rows.append(
                    RssiSample(
                        station_id=f"s{station + 1}",
                        location_id=f"l{index + 1}",
                        true_distance=float(distance),
                        rssi=rssi_from_distance(params, float(distance), rng),
                    )
                )
    return rows


def write_trace(samples: Iterable[RssiSample], sink: IO[str]) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for sample in samples:
        writer.writerow((sample.station_id, sample.location_id, repr(sample.true_distance), repr(sample.rssi)))


def distance_curve(params: ShadowingParams, samples: Iterable[RssiSample]) -> list[tuple[float, float]]:
    return [(sample.true_distance, distance_from_rssi(params, sample.rssi)) for sample in samples]


def write_distance_curve(rows: Iterable[tuple[float, float]], sink: IO[str]) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for real, estimated in rows:
        writer.writerow((repr(float(real)), repr(float(estimated))))
