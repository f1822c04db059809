from django.core.validators import MinValueValidator
from django.db import models
from django.utils.translation import gettext_lazy as _

from .choices import ClusteringMethod, ErrorKind, RunStatus


class Network(models.Model):
    """Сгенерированная или импортированная сеть: конфигурация и позиции узлов."""

    name = models.CharField(_("Название"), max_length=128, blank=True)
    width = models.FloatField(_("Ширина области"), validators=[MinValueValidator(0.0)])
    height = models.FloatField(_("Высота области"), validators=[MinValueValidator(0.0)])
    node_count = models.PositiveIntegerField(_("Число узлов"), validators=[MinValueValidator(1)])
    radius = models.FloatField(_("Радиус связи"), validators=[MinValueValidator(0.0)])
    seed = models.PositiveBigIntegerField(_("Seed"), default=0)
    mean_connectivity = models.FloatField(_("Средняя связность"), default=0.0)
    positions = models.JSONField(_("Позиции узлов"), default=list)
    created_at = models.DateTimeField(_("Создана"), auto_now_add=True)

    class Meta:
        verbose_name = _("Сеть")
        verbose_name_plural = _("Сети")
        ordering = ("-created_at",)

    def __str__(self) -> str:
        label = self.name or f"#{self.pk}"
        return f"{label}: {self.node_count} узлов, R={self.radius:g}"


class SweepRun(models.Model):
    """Развёртка параметра ошибки e по одной сети."""

    network = models.ForeignKey(
        Network,
        verbose_name=_("Сеть"),
        related_name="sweeps",
        on_delete=models.CASCADE,
    )
    status = models.CharField(
        _("Статус"),
        max_length=16,
        choices=RunStatus.choices,
        default=RunStatus.PENDING,
    )
    error_model = models.CharField(
        _("Модель ошибки"),
        max_length=16,
        choices=ErrorKind.choices,
        default=ErrorKind.RANDOM,
    )
    e_start = models.FloatField(_("Начальное e"), default=0.0)
    e_step = models.FloatField(_("Шаг e"), default=0.001)
    steps = models.PositiveIntegerField(_("Число шагов"), default=200)
    max_range = models.FloatField(_("MaxRange"), null=True, blank=True)
    max_retries = models.PositiveIntegerField(_("Повторы при пустом кластере"), default=50)
    seed = models.PositiveBigIntegerField(_("Seed"), default=0)
    methods = models.JSONField(_("Методы"), default=list)
    strict_pairs = models.BooleanField(_("Строгий метод 1"), default=False)
    error_message = models.TextField(_("Ошибка"), blank=True)
    created_at = models.DateTimeField(_("Создан"), auto_now_add=True)
    updated_at = models.DateTimeField(_("Обновлён"), auto_now=True)

    class Meta:
        verbose_name = _("Развёртка")
        verbose_name_plural = _("Развёртки")
        ordering = ("-created_at",)

    def __str__(self) -> str:
        return f"Sweep #{self.pk} ({self.get_status_display()})"


class SweepResult(models.Model):
    run = models.ForeignKey(
        SweepRun,
        verbose_name=_("Развёртка"),
        related_name="records",
        on_delete=models.CASCADE,
    )
    e = models.FloatField(_("e"))
    method = models.CharField(_("Метод"), max_length=4, choices=ClusteringMethod.choices)
    total_error = models.FloatField(_("Total Error"), null=True, blank=True)
    total_error_pct_range = models.FloatField(_("Total Error, %range"), null=True, blank=True)
    localized_count = models.PositiveIntegerField(_("Локализовано узлов"))
    node_count = models.PositiveIntegerField(_("Всего узлов"))

    class Meta:
        verbose_name = _("Результат шага")
        verbose_name_plural = _("Результаты шагов")
        ordering = ("run", "e", "method")
        constraints = [
            models.UniqueConstraint(
                fields=("run", "e", "method"),
                name="unique_run_e_method",
            )
        ]

    def __str__(self) -> str:
        return f"{self.method} @ e={self.e:g}"
