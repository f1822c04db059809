from django.db import models
from django.utils.translation import gettext_lazy as _


class ClusteringMethod(models.TextChoices):
    M1 = "m1", _("Метод 1 (Favour Points)")
    M2 = "m2", _("Метод 2 (вложенность в окружности)")
    M3 = "m3", _("Метод 3 (строгие Favour Points)")


class ErrorKind(models.TextChoices):
    CONSTANT = "constant", _("Постоянная ошибка")
    RANDOM = "random", _("Случайная ошибка")
    LINEAR = "linear", _("Линейная ошибка")
    LOGARITHMIC = "logarithmic", _("Логарифмическая ошибка")


class RunStatus(models.TextChoices):
    PENDING = "pending", _("В очереди")
    RUNNING = "running", _("Выполняется")
    COMPLETED = "completed", _("Завершён")
    FAILED = "failed", _("Ошибка")
