from django.contrib import admin

from .models import Network, SweepResult, SweepRun


@admin.register(Network)
class NetworkAdmin(admin.ModelAdmin):
    list_display = ("id", "name", "node_count", "radius", "mean_connectivity", "seed", "created_at")
    search_fields = ("name",)
    readonly_fields = ("positions",)


class SweepResultInline(admin.TabularInline):
    model = SweepResult
    extra = 0
    readonly_fields = ("e", "method", "total_error", "total_error_pct_range", "localized_count", "node_count")


@admin.register(SweepRun)
class SweepRunAdmin(admin.ModelAdmin):
    list_display = ("id", "network", "status", "error_model", "steps", "seed", "created_at")
    list_filter = ("status", "error_model")
    inlines = [SweepResultInline]


@admin.register(SweepResult)
class SweepResultAdmin(admin.ModelAdmin):
    list_display = ("run", "e", "method", "total_error", "localized_count", "node_count")
    list_filter = ("method",)
