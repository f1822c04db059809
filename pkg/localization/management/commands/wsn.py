import csv
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from localization.choices import ClusteringMethod, ErrorKind
from localization.serializers import (
    ErrorCurvesSerializer,
    NetworkConfigSerializer,
    ShadowingParamsSerializer,
    SweepSettingsSerializer,
    SyntheticTraceSerializer,
)
from localization.services.artifacts import RunManifest
from localization.services.configuration import load_experiment_config, section, validated
from localization.services.exceptions import (
    ConfigurationError,
    TooFewAnchors,
    TopologyError,
    TraceParseError,
)
from localization.services.experiments import SweepRunExecutor, store_network, store_sweep_run
from localization.services.harness import (
    emit_node_results,
    emit_plot_data,
    emit_results,
    error_model_for,
    run_sweep_detailed,
    trace_node,
)
from localization.services.network import (
    NetworkTopology,
    export_topology,
    generate,
    import_topology,
    mean_connectivity,
    random_generator,
)
from localization.services.ranging import (
    distance_curve,
    error_model_curve,
    ingest_rssi_trace,
    synthesize_trace,
    write_distance_curve,
    write_trace,
)
from localization.tasks import dispatch_sweep

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_TOPOLOGY = 4
EXIT_TRACE = 5


def _method_list(value: str) -> list[str]:
    methods = [item.strip() for item in value.split(",") if item.strip()]
    unknown = [item for item in methods if item not in ClusteringMethod.values]
    if unknown or not methods:
        raise ConfigurationError(f"Неизвестные методы: {value!r}; допустимы m1, m2, m3.")
    return methods


def _format(value: float) -> str:
    return repr(float(value))


class Command(BaseCommand):
    help = "Генерация сетей, развёртки ошибки и данные для графиков локализации WSN."

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)

        generate_parser = subparsers.add_parser("generate", help="Сгенерировать сеть и сохранить топологию.")
        self._add_common(generate_parser)

        sweep_parser = subparsers.add_parser("sweep", help="Развёртка e для методов кластеризации.")
        self._add_common(sweep_parser)
        sweep_parser.add_argument("--methods", help="Список методов через запятую, например m1,m3.")
        sweep_parser.add_argument("--plot-data", action="store_true", help="Файлы (e, %%range) по каждому методу.")
        sweep_parser.add_argument("--strict-pairs", action="store_true", help="Метод 1: пустой кластер при паре без пересечения.")
        sweep_parser.add_argument("--details", action="store_true", help="Результаты по каждому узлу.")
        sweep_parser.add_argument("--parallel", action="store_true", help="Распределить шаги e по задачам Celery.")
        sweep_parser.add_argument("--save", action="store_true", help="Сохранить сеть, развёртку и результаты в БД.")
        sweep_parser.add_argument("--name", default="", help="Название сети при --save.")

        localize_parser = subparsers.add_parser("localize-one", help="Окружности, точки и кластер одного узла.")
        self._add_common(localize_parser)
        localize_parser.add_argument("--node", type=int, required=True)
        localize_parser.add_argument("--method", choices=ClusteringMethod.values, default=ClusteringMethod.M1.value)
        localize_parser.add_argument("--e", type=float, default=0.0)
        localize_parser.add_argument("--strict-pairs", action="store_true")

        models_parser = subparsers.add_parser("error-models", help="Кривые четырёх моделей ошибки.")
        self._add_common(models_parser)
        models_parser.add_argument("--e", type=float)
        models_parser.add_argument("--max-range", type=float)
        models_parser.add_argument("--samples", type=int)

        rssi_parser = subparsers.add_parser("rssi", help="Перевод RSSI в расстояние.")
        self._add_common(rssi_parser)
        rssi_parser.add_argument("--trace", type=Path, help="CSV-трасса station_id,location_id,true_distance,rssi.")
        rssi_parser.add_argument("--synthetic", action="store_true", help="Сначала сгенерировать трассу.")

    def _add_common(self, parser):
        parser.add_argument("--config", type=Path, help="Файл конфигурации (JSON или YAML).")
        parser.add_argument("--out", type=Path, default=None, help="Каталог результатов.")
        parser.add_argument("--seed", type=int, default=None, help="Переопределяет seed из конфигурации.")
        parser.add_argument("--force", action="store_true", help="Перезаписывать существующие файлы.")

    def handle(self, *args, **options):
        subcommand = options["subcommand"]
        manifest = RunManifest(
            command=subcommand,
            output_dir=options["out"] or settings.WSN_OUTPUT_DIR,
            config_path=options["config"],
            seed=options["seed"],
            force=options["force"],
        )
        handler = getattr(self, f"handle_{subcommand.replace('-', '_')}")
        try:
            config = load_experiment_config(options["config"])
            manifest.prepare()
            handler(manifest, config, options)
            manifest.write()
        except ConfigurationError as exc:
            raise CommandError(f"Ошибка конфигурации: {exc}", returncode=EXIT_CONFIG)
        except TraceParseError as exc:
            raise CommandError(f"Ошибка разбора трассы: {exc}", returncode=EXIT_TRACE)
        except (TopologyError, TooFewAnchors) as exc:
            raise CommandError(str(exc), returncode=EXIT_TOPOLOGY)
        except OSError as exc:
            raise CommandError(f"Ошибка ввода-вывода: {exc}", returncode=EXIT_IO)
        except ValueError as exc:
            raise CommandError(f"Ошибка конфигурации: {exc}", returncode=EXIT_CONFIG)

    def _seeded(self, data: dict, options) -> dict:
        if options["seed"] is not None:
            data["seed"] = options["seed"]
        return data

    def _network_config(self, config: dict, options):
        return validated(NetworkConfigSerializer, self._seeded(section(config, "network"), options))

    def _topology(self, config: dict, options) -> NetworkTopology:
        reference = config.get("topology")
        if reference:
            base = options["config"].parent if options["config"] else Path.cwd()
            return import_topology(base / reference)
        if not config.get("network"):
            raise ConfigurationError("Нужна секция `network` или путь `topology`.")
        return generate(self._network_config(config, options))

    def handle_generate(self, manifest: RunManifest, config: dict, options):
        topology = generate(self._network_config(config, options))
        manifest.seed = topology.config.seed
        manifest.target("topology.json")
        manifest.target("topology.csv")
        export_topology(topology, manifest.output_dir)
        self.stdout.write(
            self.style.SUCCESS(
                f"Сеть: {topology.node_count} узлов, R={topology.config.radius:.6g}, "
                f"средняя связность {mean_connectivity(topology):.4f}"
            )
        )

    def handle_sweep(self, manifest: RunManifest, config: dict, options):
        topology = self._topology(config, options)
        data = self._seeded(section(config, "sweep"), options)
        if options["methods"]:
            data["methods"] = _method_list(options["methods"])
        if options["strict_pairs"]:
            data["strict_pairs"] = True
        cfg = validated(SweepSettingsSerializer, data, network=topology.config)
        manifest.seed = cfg.seed

        if options["parallel"]:
            outcome = dispatch_sweep(cfg, topology)
        else:
            outcome = run_sweep_detailed(cfg, topology)

        with manifest.open("results.csv") as sink:
            emit_results(outcome.records, sink)
        if options["plot_data"]:
            for method in cfg.methods:
                with manifest.open(f"plot_{ClusteringMethod(method).value}.csv") as sink:
                    emit_plot_data(outcome.records, method, sink)
        if options["details"]:
            with manifest.open("node_results.csv") as sink:
                emit_node_results(outcome.details, sink)
        if options["save"]:
            run = store_sweep_run(store_network(topology, name=options["name"]), cfg)
            SweepRunExecutor(run).complete(outcome.records)
            self.stdout.write(f"Развёртка сохранена: #{run.pk}")
        self.stdout.write(self.style.SUCCESS(f"Записано строк результатов: {len(outcome.records)}"))

    def handle_localize_one(self, manifest: RunManifest, config: dict, options):
        topology = self._topology(config, options)
        data = self._seeded(section(config, "sweep"), options)
        if options["strict_pairs"]:
            data["strict_pairs"] = True
        cfg = validated(SweepSettingsSerializer, data, network=topology.config)
        manifest.seed = cfg.seed
        e = options["e"]
        model = error_model_for(cfg, topology, e)
        # ближайший шаг сетки e, чтобы повторить выборку развёртки
        e_index = max(0, round((e - cfg.e_start) / cfg.e_step))
        method = ClusteringMethod(options["method"])
        trace = trace_node(
            topology,
            options["node"],
            model,
            method,
            seed=cfg.seed,
            e_index=e_index,
            max_retries=cfg.max_retries,
            strict_pairs=cfg.strict_pairs,
        )

        chosen = set(zip(trace.cluster.sources, trace.cluster.points))
        with manifest.open(f"node_{trace.node}_{method.value}.csv") as sink:
            writer = csv.writer(sink, lineterminator="\n")
            writer.writerow(("[ANCHORS]",))
            writer.writerow(("x", "y", "est_radius"))
            for circle in trace.circles:
                writer.writerow((_format(circle.center.x), _format(circle.center.y), _format(circle.radius)))
            writer.writerow(("[POINTS]",))
            writer.writerow(("x", "y", "pair_i", "pair_j", "chosen"))
            for pair in trace.scan.pairs:
                for point in pair.points:
                    flag = int(((pair.circle_i, pair.circle_j), point) in chosen)
                    writer.writerow((_format(point.x), _format(point.y), pair.circle_i, pair.circle_j, flag))
            writer.writerow(("[ESTIMATE]",))
            writer.writerow(("x", "y"))
            if trace.estimate is not None:
                writer.writerow((_format(trace.estimate.x), _format(trace.estimate.y)))
            writer.writerow(("[TRUE]",))
            writer.writerow(("x", "y"))
            writer.writerow((_format(trace.true_position.x), _format(trace.true_position.y)))

        if trace.estimate is None:
            self.stdout.write(self.style.WARNING(f"Узел {trace.node}: кластер пуст после {trace.attempts} попыток."))
        else:
            error = trace.estimate.distance_to(trace.true_position)
            self.stdout.write(
                self.style.SUCCESS(
                    f"Узел {trace.node}: оценка ({trace.estimate.x:.6g}, {trace.estimate.y:.6g}), ошибка {error:.6g}"
                )
            )

    def handle_error_models(self, manifest: RunManifest, config: dict, options):
        data = self._seeded(section(config, "error_models"), options)
        for flag, key in (("e", "e"), ("max_range", "max_range"), ("samples", "samples")):
            if options[flag] is not None:
                data[key] = options[flag]
        curves = validated(ErrorCurvesSerializer, data)
        manifest.seed = curves["seed"]
        for kind in ErrorKind:
            rows = error_model_curve(
                curves["models"][kind],
                curves["samples"],
                random_generator(curves["seed"]),
                curves["sign"],
            )
            with manifest.open(f"{kind.value}.csv") as sink:
                write_distance_curve(rows, sink)
        self.stdout.write(self.style.SUCCESS(f"Кривые моделей ошибки: {len(ErrorKind)} файла"))

    def handle_rssi(self, manifest: RunManifest, config: dict, options):
        params = validated(ShadowingParamsSerializer, section(config, "shadowing"))
        if options["synthetic"]:
            synthetic = validated(SyntheticTraceSerializer, self._seeded(section(config, "synthetic"), options))
            manifest.seed = synthetic["seed"]
            raw = synthesize_trace(
                params,
                synthetic["stations"],
                synthetic["distances"],
                synthetic["messages"],
                random_generator(synthetic["seed"]),
            )
            with manifest.open("synthetic_trace.csv") as sink:
                write_trace(raw, sink)
            trace_path = manifest.output_dir / "synthetic_trace.csv"
        elif options["trace"] is not None:
            trace_path = options["trace"]
        else:
            raise ConfigurationError("Укажите --trace PATH или --synthetic.")

        with open(trace_path, "rb") as source:
            samples = ingest_rssi_trace(source)
        curve = distance_curve(params, samples)
        with manifest.open("distance_curve.csv") as sink:
            write_distance_curve(curve, sink)
        self.stdout.write(self.style.SUCCESS(f"Кривая расстояний: {len(samples)} точек"))
