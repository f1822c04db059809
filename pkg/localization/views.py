import io

from django.http import HttpResponse
from drf_spectacular.utils import OpenApiResponse, extend_schema
from rest_framework import mixins, status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from .models import Network, SweepResult, SweepRun
from .serializers import (
    NetworkCreateSerializer,
    NetworkSerializer,
    SweepResultSerializer,
    SweepRunSerializer,
)
from .services.experiments import records_of
from .services.harness import emit_results
from .tasks import execute_sweep_run


class NetworkViewSet(
    mixins.ListModelMixin,
    mixins.RetrieveModelMixin,
    mixins.CreateModelMixin,
    mixins.DestroyModelMixin,
    viewsets.GenericViewSet,
):
    queryset = Network.objects.all()
    serializer_class = NetworkSerializer
    ordering_fields = ("created_at", "node_count", "radius")

    def get_serializer_class(self):
        if self.action == "create":
            return NetworkCreateSerializer
        return NetworkSerializer

    @extend_schema(request=NetworkCreateSerializer, responses={201: NetworkSerializer})
    def create(self, request, *args, **kwargs):
        serializer = NetworkCreateSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        network = serializer.save()
        return Response(NetworkSerializer(network).data, status=status.HTTP_201_CREATED)


class SweepRunViewSet(
    mixins.ListModelMixin,
    mixins.RetrieveModelMixin,
    mixins.CreateModelMixin,
    viewsets.GenericViewSet,
):
    queryset = SweepRun.objects.select_related("network")
    serializer_class = SweepRunSerializer
    filterset_fields = ("network", "status", "error_model")
    ordering_fields = ("created_at",)

    def perform_create(self, serializer):
        run = serializer.save()
        execute_sweep_run.delay(run.pk)

    @extend_schema(responses={200: OpenApiResponse(description="CSV с результатами развёртки")})
    @action(detail=True, methods=["get"], url_path="results.csv")
    def results_csv(self, request, pk=None):
        run = self.get_object()
        sink = io.StringIO()
        emit_results(records_of(run), sink)
        response = HttpResponse(sink.getvalue(), content_type="text/csv; charset=utf-8")
        response["Content-Disposition"] = f'attachment; filename="sweep_{run.pk}_results.csv"'
        return response


class SweepResultViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = SweepResult.objects.all()
    serializer_class = SweepResultSerializer
    filterset_fields = ("run", "method")
    ordering_fields = ("e", "total_error")
