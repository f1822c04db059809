class LocalizationError(Exception):
    """Базовая ошибка модуля локализации."""


class EmptyCluster(LocalizationError):
    """Кластер точек пересечения пуст, позицию вычислить нельзя."""


class TooFewAnchors(LocalizationError):
    """Для кластеризации нужно минимум три окружности."""

    def __init__(self, count: int):
        self.count = count
        super().__init__(f"Нужно минимум 3 якоря, получено {count}.")


class InvalidDistance(LocalizationError, ValueError):
    pass


class TopologyError(LocalizationError):
    pass


class TraceParseError(LocalizationError):
    """Ошибка разбора CSV-трассы RSSI; line: номер строки файла (с 1)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigurationError(LocalizationError):
    """Некорректный файл конфигурации эксперимента."""
