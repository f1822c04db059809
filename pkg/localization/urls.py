from django.urls import include, path
from rest_framework.routers import DefaultRouter

from .views import NetworkViewSet, SweepResultViewSet, SweepRunViewSet

router = DefaultRouter()
router.register(r"networks", NetworkViewSet, basename="network")
router.register(r"sweeps", SweepRunViewSet, basename="sweep")
router.register(r"results", SweepResultViewSet, basename="result")

urlpatterns = [
    path("", include(router.urls)),
]
