from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml
from rest_framework import serializers

from .exceptions import ConfigurationError

SECTIONS = ("network", "topology", "sweep", "shadowing", "synthetic", "error_models")


def load_experiment_config(path: Path | str | None) -> dict[str, Any]:
    """Читает конфигурацию эксперимента из YAML или JSON (JSON читается как YAML)."""
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as source:
            payload = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"Ошибка парсинга конфигурации {path}: {exc}")
    if payload is None:
        return {}
    if not isinstance(payload, dict):
        raise ConfigurationError(f"Конфигурация {path} должна быть словарём секций.")
    unknown = sorted(set(payload) - set(SECTIONS))
    if unknown:
        raise ConfigurationError(f"Неизвестные секции конфигурации: {', '.join(unknown)}.")
    for name, section in payload.items():
        if name != "topology" and section is not None and not isinstance(section, dict):
            raise ConfigurationError(f"Секция `{name}` должна быть словарём.")
    return payload


def section(config: dict[str, Any], name: str) -> dict[str, Any]:
    return dict(config.get(name) or {})


def validated(serializer_class: type[serializers.Serializer], data: dict[str, Any], **save_kwargs):
    """Проверяет секцию сериализатором и возвращает результат его save()."""
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        raise ConfigurationError(_flatten_errors(serializer.errors))
    try:
        return serializer.save(**save_kwargs)
    except ValueError as exc:
        raise ConfigurationError(str(exc))


def _flatten_errors(errors: Any, prefix: str = "") -> str:
    if isinstance(errors, dict):
        parts = [_flatten_errors(value, f"{prefix}{key}: " if key != "non_field_errors" else prefix) for key, value in errors.items()]
        return "; ".join(parts)
    if isinstance(errors, list):
        return "; ".join(_flatten_errors(value, prefix) for value in errors)
    return f"{prefix}{errors}"
