import numpy as np
from django.conf import settings
from django.utils.translation import gettext_lazy as _
from rest_framework import serializers

from .choices import ClusteringMethod, ErrorKind
from .models import Network, SweepResult, SweepRun
from .services.experiments import store_network, sweep_config_for
from .services.harness import SweepConfig
from .services.network import REFERENCE_NETWORKS, NetworkConfig, calibrate_radius, generate
from .services.ranging import ErrorModel, ShadowingParams, Sign

MAX_SEED = 2**63 - 1


def _default_methods():
    return [method.value for method in ClusteringMethod]


def _default_max_retries():
    return settings.WSN_DEFAULT_MAX_RETRIES


def _require_positive(attrs, *names):
    errors = {name: _("Значение должно быть больше нуля.") for name in names if attrs.get(name) is not None and not attrs[name] > 0}
    if errors:
        raise serializers.ValidationError(errors)


class NetworkConfigSerializer(serializers.Serializer):
    """Секция `network`: область, число узлов и радиус (явный, пресет или калибровка)."""

    preset = serializers.ChoiceField(choices=sorted(REFERENCE_NETWORKS), required=False)
    literal_radius = serializers.BooleanField(default=False)
    width = serializers.FloatField(required=False)
    height = serializers.FloatField(required=False)
    node_count = serializers.IntegerField(min_value=1, required=False)
    radius = serializers.FloatField(required=False)
    target_mean_connectivity = serializers.FloatField(required=False)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=0)

    def validate(self, attrs):
        preset = REFERENCE_NETWORKS.get(attrs.get("preset"))
        if preset is not None:
            attrs.setdefault("width", preset.width)
            attrs.setdefault("height", preset.height)
            attrs.setdefault("node_count", preset.node_count)
            if "radius" not in attrs:
                if attrs["literal_radius"]:
                    attrs["radius"] = preset.literal_radius
                else:
                    attrs.setdefault("target_mean_connectivity", preset.mean_connectivity)
        attrs.setdefault("width", 1.0)
        attrs.setdefault("height", 1.0)
        attrs.setdefault("node_count", 100)
        _require_positive(attrs, "width", "height", "radius", "target_mean_connectivity")
        if "radius" not in attrs and "target_mean_connectivity" not in attrs:
            raise serializers.ValidationError(_("Укажите radius, target_mean_connectivity или preset."))
        target = attrs.get("target_mean_connectivity")
        if "radius" not in attrs and not target < attrs["node_count"] - 1:
            raise serializers.ValidationError(
                {"target_mean_connectivity": _("Средняя связность должна быть меньше node_count - 1.")}
            )
        return attrs

    def create(self, validated_data) -> NetworkConfig:
        radius = validated_data.get("radius")
        if radius is None:
            radius = calibrate_radius(
                validated_data["width"],
                validated_data["height"],
                validated_data["node_count"],
                validated_data["target_mean_connectivity"],
                seeds=range(settings.WSN_CALIBRATION_SEEDS),
            )
        return NetworkConfig(
            width=validated_data["width"],
            height=validated_data["height"],
            node_count=validated_data["node_count"],
            radius=radius,
            seed=validated_data["seed"],
        )


class SweepSettingsSerializer(serializers.Serializer):
    """Секция `sweep`; сеть передаётся в save(network=...)."""

    e_start = serializers.FloatField(min_value=0.0, default=0.0)
    e_step = serializers.FloatField(default=0.001)
    steps = serializers.IntegerField(min_value=1, default=200)
    error_model = serializers.ChoiceField(choices=ErrorKind.choices, default=ErrorKind.RANDOM)
    max_range = serializers.FloatField(required=False, allow_null=True)
    max_retries = serializers.IntegerField(min_value=0, default=_default_max_retries)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=0)
    methods = serializers.ListField(
        child=serializers.ChoiceField(choices=ClusteringMethod.choices),
        min_length=1,
        default=_default_methods,
    )
    strict_pairs = serializers.BooleanField(default=False)

    def validate(self, attrs):
        _require_positive(attrs, "e_step", "max_range")
        if attrs["e_start"] + attrs["steps"] * attrs["e_step"] >= 1:
            raise serializers.ValidationError(_("Последнее значение e должно быть меньше 1."))
        return attrs

    def create(self, validated_data) -> SweepConfig:
        methods = tuple(dict.fromkeys(ClusteringMethod(m) for m in validated_data.pop("methods")))
        return SweepConfig(
            methods=tuple(sorted(methods, key=lambda m: m.value)),
            error_model=ErrorKind(validated_data.pop("error_model")),
            **validated_data,
        )


class ShadowingParamsSerializer(serializers.Serializer):
    rssi_0 = serializers.FloatField(default=-40.0)
    d_0 = serializers.FloatField(default=1.0)
    n_atten = serializers.FloatField(default=2.0)
    sigma = serializers.FloatField(min_value=0.0, default=0.0)

    def validate(self, attrs):
        _require_positive(attrs, "d_0", "n_atten")
        return attrs

    def create(self, validated_data) -> ShadowingParams:
        return ShadowingParams(**validated_data)


class SyntheticTraceSerializer(serializers.Serializer):
    """Секция `synthetic`: станции, линия точек на станцию, число сообщений в точке."""

    stations = serializers.IntegerField(min_value=1, default=4)
    min_distance = serializers.FloatField(default=0.5)
    max_distance = serializers.FloatField(default=10.0)
    points = serializers.IntegerField(min_value=1, default=20)
    messages = serializers.IntegerField(min_value=1, default=200)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=0)

    def validate(self, attrs):
        _require_positive(attrs, "min_distance", "max_distance")
        if attrs["min_distance"] > attrs["max_distance"]:
            raise serializers.ValidationError(_("min_distance не может превышать max_distance."))
        return attrs

    def create(self, validated_data) -> dict:
        distances = np.linspace(validated_data["min_distance"], validated_data["max_distance"], validated_data["points"])
        return {
            "stations": validated_data["stations"],
            "distances": [float(d) for d in distances],
            "messages": validated_data["messages"],
            "seed": validated_data["seed"],
        }


class ErrorCurvesSerializer(serializers.Serializer):
    e = serializers.FloatField(min_value=0.0, default=0.2)
    max_range = serializers.FloatField(default=6.0)
    samples = serializers.IntegerField(min_value=2, default=61)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=0)
    sign = serializers.ChoiceField(choices=("plus", "minus"), default="plus")

    def validate(self, attrs):
        if not attrs["e"] < 1:
            raise serializers.ValidationError({"e": _("e должно быть меньше 1.")})
        _require_positive(attrs, "max_range")
        return attrs

    def create(self, validated_data) -> dict:
        return {
            "models": {
                kind: ErrorModel(kind=kind, e=validated_data["e"], max_range=validated_data["max_range"])
                for kind in ErrorKind
            },
            "samples": validated_data["samples"],
            "seed": validated_data["seed"],
            "sign": Sign.PLUS if validated_data["sign"] == "plus" else Sign.MINUS,
        }


class NetworkSerializer(serializers.ModelSerializer):
    class Meta:
        model = Network
        fields = (
            "id",
            "name",
            "width",
            "height",
            "node_count",
            "radius",
            "seed",
            "mean_connectivity",
            "positions",
            "created_at",
        )
        read_only_fields = fields


class NetworkCreateSerializer(NetworkConfigSerializer):
    name = serializers.CharField(max_length=128, required=False, allow_blank=True, default="")

    def create(self, validated_data) -> Network:
        name = validated_data.pop("name", "")
        return store_network(generate(super().create(validated_data)), name=name)


class SweepResultSerializer(serializers.ModelSerializer):
    class Meta:
        model = SweepResult
        fields = (
            "id",
            "run",
            "e",
            "method",
            "total_error",
            "total_error_pct_range",
            "localized_count",
            "node_count",
        )


class SweepRunSerializer(serializers.ModelSerializer):
    methods = serializers.ListField(
        child=serializers.ChoiceField(choices=ClusteringMethod.choices),
        min_length=1,
        default=_default_methods,
    )

    class Meta:
        model = SweepRun
        fields = (
            "id",
            "network",
            "status",
            "error_model",
            "e_start",
            "e_step",
            "steps",
            "max_range",
            "max_retries",
            "seed",
            "methods",
            "strict_pairs",
            "error_message",
            "created_at",
            "updated_at",
        )
        read_only_fields = ("status", "error_message", "created_at", "updated_at")

    def validate(self, attrs):
        try:
            sweep_config_for(SweepRun(**attrs))
        except ValueError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs
