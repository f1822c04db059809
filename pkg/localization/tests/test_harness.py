import io
from dataclasses import replace
from statistics import fmean
from unittest.mock import Mock

from django.test import SimpleTestCase

from localization.choices import ClusteringMethod, ErrorKind
from localization.services.exceptions import TooFewAnchors
from localization.services.geometry import Point2, geometry_tolerance
from localization.services.harness import (
    NodeResult,
    SweepConfig,
    SweepRecord,
    aggregate,
    emit_node_results,
    emit_plot_data,
    emit_results,
    error_model_for,
    localize_node,
    run_sweep,
    run_sweep_detailed,
    substream,
    trace_node,
)
from localization.services.network import REFERENCE_NETWORKS, NetworkConfig, anchors_of, calibrate_radius, generate
from localization.services.ranging import ErrorModel
from localization.tasks import dispatch_sweep

from .factories import CENTRE, collinear_topology, pentagon_topology, right_triangle_topology, triangle_topology


def scripted_source(magnitude: float, direction_bit: int) -> Mock:
    rng = Mock()
    rng.uniform.return_value = magnitude
    rng.integers.return_value = direction_bit
    return rng


def csv_of(records) -> str:
    sink = io.StringIO()
    emit_results(records, sink)
    return sink.getvalue()


class SweepConfigTests(SimpleTestCase):
    def test_grid_includes_both_ends(self):
        cfg = SweepConfig(network=triangle_topology())

        self.assertEqual(len(cfg.e_indices), 201)
        self.assertEqual(cfg.e_value(0), 0.0)
        self.assertAlmostEqual(cfg.e_value(200), 0.2, delta=1e-12)

    def test_invalid_values(self):
        topology = triangle_topology()
        for kwargs in (
            {"e_start": -0.1},
            {"e_step": 0.0},
            {"steps": 0},
            {"max_retries": -1},
            {"methods": ()},
            {"e_step": 0.01, "steps": 100},
        ):
            with self.subTest(**kwargs), self.assertRaises(ValueError):
                SweepConfig(network=topology, **kwargs)

    def test_max_range_defaults_to_radius(self):
        topology = triangle_topology()

        self.assertEqual(error_model_for(SweepConfig(network=topology), topology, 0.1).max_range, 0.25)
        self.assertEqual(error_model_for(SweepConfig(network=topology, max_range=6.0), topology, 0.1).max_range, 6.0)


class LocalizeNodeTests(SimpleTestCase):
    def localize(self, topology, model, method, streams=None, max_retries=50, node=0):
        streams = streams or (lambda attempt: substream(0, 0, node, attempt))
        return localize_node(
            node,
            topology.positions[node],
            anchors_of(topology, node),
            model,
            method,
            streams,
            max_retries=max_retries,
        )

    def test_zero_error_is_exact_inside_anchor_hull(self):
        for topology in (triangle_topology(), pentagon_topology(), right_triangle_topology()):
            for method in ClusteringMethod:
                with self.subTest(nodes=topology.node_count, method=method):
                    result = self.localize(topology, ErrorModel(ErrorKind.RANDOM, 0.0), method)
                    self.assertTrue(result.localized)
                    self.assertEqual(result.attempts, 1)
                    self.assertLessEqual(result.error_distance, 10 * geometry_tolerance(1.0))

    def test_two_anchors_are_not_enough(self):
        topology = triangle_topology()
        anchors = anchors_of(topology, 0)[:2]

        result = localize_node(0, CENTRE, anchors, ErrorModel(ErrorKind.RANDOM, 0.1), ClusteringMethod.M1, lambda a: substream(0, 0, 0, a))

        self.assertFalse(result.localized)
        self.assertIsNone(result.error_distance)
        self.assertEqual(result.attempts, 0)

    def test_retry_after_empty_cluster(self):
        sources = [scripted_source(0.199, 0), scripted_source(0.0, 1)]

        for method in ClusteringMethod:
            with self.subTest(method=method):
                result = self.localize(
                    triangle_topology(),
                    ErrorModel(ErrorKind.RANDOM, 0.2),
                    method,
                    streams=lambda attempt: sources[attempt],
                )
                self.assertEqual(result.attempts, 2)
                self.assertTrue(result.localized)
                self.assertLessEqual(result.error_distance, 1e-8)

    def test_retries_are_bounded(self):
        result = self.localize(
            triangle_topology(),
            ErrorModel(ErrorKind.RANDOM, 0.2),
            ClusteringMethod.M1,
            streams=lambda attempt: scripted_source(0.199, 0),
            max_retries=4,
        )

        self.assertFalse(result.localized)
        self.assertEqual(result.attempts, 5)

    def test_deterministic_model_is_not_retried(self):
        for model in (ErrorModel(ErrorKind.RANDOM, 0.0), ErrorModel(ErrorKind.LINEAR, 0.1)):
            with self.subTest(kind=model.kind):
                result = self.localize(collinear_topology(), model, ClusteringMethod.M1)
                self.assertFalse(result.localized)
                self.assertEqual(result.attempts, 1)

    def test_error_grows_with_e(self):
        topology = pentagon_topology()

        def mean_error(e):
            errors = []
            for seed in range(200):
                result = self.localize(
                    topology,
                    ErrorModel(ErrorKind.RANDOM, e),
                    ClusteringMethod.M2,
                    streams=lambda attempt, seed=seed: substream(seed, 0, 0, attempt),
                )
                if result.localized:
                    errors.append(result.error_distance)
            return fmean(errors)

        self.assertGreater(mean_error(0.15), mean_error(0.01))

    def test_method2_estimate_lies_in_every_disc(self):
        topology = pentagon_topology()
        model = ErrorModel(ErrorKind.RANDOM, 0.1)
        for seed in range(200):
            trace = trace_node(topology, 0, model, ClusteringMethod.M2, seed=seed)
            if trace.estimate is None:
                continue
            for circle in trace.circles:
                self.assertLessEqual(trace.estimate.distance_to(circle.center), circle.radius + 2e-9)

    def test_estimate_stays_in_circle_union_box(self):
        topology = pentagon_topology()
        model = ErrorModel(ErrorKind.RANDOM, 0.2)
        for method in ClusteringMethod:
            for seed in range(100):
                trace = trace_node(topology, 0, model, method, seed=seed)
                if trace.estimate is None:
                    continue
                circles = trace.circles
                slack = geometry_tolerance(*(abs(c.center.x) + c.radius for c in circles), *(abs(c.center.y) + c.radius for c in circles))
                with self.subTest(method=method, seed=seed):
                    self.assertGreaterEqual(trace.estimate.x, min(c.center.x - c.radius for c in circles) - slack)
                    self.assertLessEqual(trace.estimate.x, max(c.center.x + c.radius for c in circles) + slack)
                    self.assertGreaterEqual(trace.estimate.y, min(c.center.y - c.radius for c in circles) - slack)
                    self.assertLessEqual(trace.estimate.y, max(c.center.y + c.radius for c in circles) + slack)


class TraceNodeTests(SimpleTestCase):
    def test_exact_trace(self):
        trace = trace_node(right_triangle_topology(), 0, ErrorModel(ErrorKind.RANDOM, 0.0), ClusteringMethod.M1)

        self.assertEqual(len(trace.circles), 3)
        self.assertEqual(len(trace.scan.pairs), 3)
        self.assertEqual(len(trace.cluster.points), 3)
        self.assertAlmostEqual(trace.estimate.x, 1.0)
        self.assertAlmostEqual(trace.estimate.y, 1.0)
        self.assertEqual(trace.true_position, Point2(1, 1))

    def test_isolated_node(self):
        with self.assertRaises(TooFewAnchors):
            trace_node(triangle_topology(), 1, ErrorModel(ErrorKind.RANDOM, 0.0), ClusteringMethod.M1)

    def test_matches_sweep_draws(self):
        topology = pentagon_topology()
        cfg = SweepConfig(network=topology, steps=100, seed=9, methods=(ClusteringMethod.M2,))
        outcome = run_sweep_detailed(cfg)
        node_result = next(d for d in outcome.details if d.node == 0 and d.e == cfg.e_value(80))

        trace = trace_node(topology, 0, error_model_for(cfg, topology, cfg.e_value(80)), ClusteringMethod.M2, seed=9, e_index=80)

        self.assertEqual(trace.attempts, node_result.attempts)
        self.assertEqual(trace.estimate, node_result.estimated)


class AggregateTests(SimpleTestCase):
    def test_mean_over_localized_nodes(self):
        results = [
            NodeResult(0, ClusteringMethod.M1, Point2(0, 0), 0.01, 1),
            NodeResult(1, ClusteringMethod.M1, Point2(0, 0), 0.03, 1),
            NodeResult(2, ClusteringMethod.M1, None, None, 0),
        ]

        record = aggregate(0.1, ClusteringMethod.M1, results, 3, 0.25)

        self.assertAlmostEqual(record.total_error, 0.02)
        self.assertAlmostEqual(record.total_error_pct_range, 8.0)
        self.assertEqual(record.localized_count, 2)
        self.assertEqual(record.node_count, 3)

    def test_nothing_localized(self):
        record = aggregate(0.1, ClusteringMethod.M2, [NodeResult(0, ClusteringMethod.M2, None, None, 0)], 1, 0.25)

        self.assertIsNone(record.total_error)
        self.assertIsNone(record.total_error_pct_range)
        self.assertEqual(record.localized_count, 0)


class RunSweepTests(SimpleTestCase):
    def test_default_grid_for_every_method(self):
        records = run_sweep(SweepConfig(network=triangle_topology()))

        self.assertEqual(len(records), 201 * 3)
        self.assertAlmostEqual(records[-1].e, 0.2, delta=1e-12)
        self.assertEqual({r.method for r in records}, set(ClusteringMethod))
        self.assertTrue(all(r.node_count == 4 for r in records))

    def test_zero_error_records(self):
        records = run_sweep(SweepConfig(network=triangle_topology(), steps=1))

        for record in records:
            if record.e == 0.0:
                with self.subTest(method=record.method):
                    self.assertEqual(record.localized_count, 1)
                    self.assertLessEqual(record.total_error, 10 * geometry_tolerance(1.0))

    def test_method_filter(self):
        records = run_sweep(SweepConfig(network=triangle_topology(), steps=10, methods=(ClusteringMethod.M2,)))

        self.assertEqual({r.method for r in records}, {ClusteringMethod.M2})
        self.assertEqual(len(records), 11)

    def test_rerun_is_byte_identical(self):
        cfg = SweepConfig(network=pentagon_topology(), steps=50, seed=3)

        self.assertEqual(csv_of(run_sweep(cfg)), csv_of(run_sweep(cfg)))

    def test_methods_share_draws(self):
        cfg = SweepConfig(network=pentagon_topology(), steps=20, seed=3)
        alone = run_sweep(replace(cfg, methods=(ClusteringMethod.M3,)))
        together = [r for r in run_sweep(cfg) if r.method == ClusteringMethod.M3]

        self.assertEqual(alone, together)

    def test_parallel_dispatch_matches_sequential(self):
        topology = pentagon_topology()
        cfg = SweepConfig(network=topology, steps=40, seed=11)

        sequential = run_sweep_detailed(cfg, topology)
        parallel = dispatch_sweep(cfg, topology, chunk_size=7)

        self.assertEqual(csv_of(parallel.records), csv_of(sequential.records))
        self.assertEqual(parallel.details, sequential.details)

    def test_seed_changes_random_draws(self):
        first = run_sweep(SweepConfig(network=pentagon_topology(), steps=20, seed=1))
        second = run_sweep(SweepConfig(network=pentagon_topology(), steps=20, seed=2))

        self.assertNotEqual(csv_of(first), csv_of(second))


class EmitTests(SimpleTestCase):
    def test_empty_results(self):
        self.assertEqual(csv_of([]), "e,method,total_error,total_error_pct_range,localized_count,node_count\n")

    def test_single_record(self):
        lines = csv_of([SweepRecord(0.0, ClusteringMethod.M3, 0.0, 0.0, 100, 100)]).splitlines()

        self.assertEqual(lines[1], "0,m3,0,0,100,100")
        self.assertTrue(all(len(line.split(",")) == 6 for line in lines))

    def test_unlocalized_record_has_empty_errors(self):
        lines = csv_of([SweepRecord(0.1, ClusteringMethod.M1, None, None, 0, 4)]).splitlines()

        self.assertEqual(lines[1], "0.1,m1,,,0,4")

    def test_plot_data_per_method(self):
        records = [
            SweepRecord(0.001, ClusteringMethod.M1, 0.01, 4.0, 1, 1),
            SweepRecord(0.0, ClusteringMethod.M1, 0.0, 0.0, 1, 1),
            SweepRecord(0.0, ClusteringMethod.M2, 0.5, 200.0, 1, 1),
        ]
        sink = io.StringIO()

        emit_plot_data(records, ClusteringMethod.M1, sink)

        self.assertEqual(sink.getvalue(), "e,total_error_pct_range\n0,0\n0.001,4\n")

    def test_node_results(self):
        sink = io.StringIO()

        emit_node_results([NodeResult(3, ClusteringMethod.M2, None, None, 51, e=0.2)], sink)

        self.assertEqual(sink.getvalue(), "e,method,node,attempts,error_distance\n0.2,m2,3,51,\n")


class SubstreamTests(SimpleTestCase):
    def test_same_key_same_draws(self):
        self.assertEqual(substream(5, 1, 2, 3).random(4).tolist(), substream(5, 1, 2, 3).random(4).tolist())

    def test_keys_are_independent(self):
        base = substream(5, 1, 2, 3).random(4).tolist()
        for other in (substream(6, 1, 2, 3), substream(5, 2, 2, 3), substream(5, 1, 3, 3), substream(5, 1, 2, 4)):
            self.assertNotEqual(other.random(4).tolist(), base)


class ReferenceNetworkOrderingTests(SimpleTestCase):
    """Методы на четырёх откалиброванных эталонных сетях, по три сети на каждую.

    Фиксирует измеренный порядок: метод 2 хуже методов 1 и 3, а методы 1 и 3 совпадают.
    """

    E_INDICES = (0, *range(30, 201, 34))
    SEEDS = range(3)

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.records = {}
        for name, reference in REFERENCE_NETWORKS.items():
            radius = calibrate_radius(reference.width, reference.height, reference.node_count, reference.mean_connectivity)
            records = []
            for seed in cls.SEEDS:
                topology = generate(NetworkConfig(reference.width, reference.height, reference.node_count, radius, seed=seed))
                records.extend(run_sweep_detailed(SweepConfig(network=topology, seed=seed), topology, cls.E_INDICES).records)
            cls.records[name] = records

    def mean_pct(self, name: str, method: ClusteringMethod, noisy: bool = True) -> float:
        return fmean(
            r.total_error_pct_range
            for r in self.records[name]
            if r.method == method and (r.e > 0) == noisy and r.total_error_pct_range is not None
        )

    def test_method1_and_method3_records_coincide(self):
        for name, records in self.records.items():
            by_method = {
                method: [(r.e, r.total_error, r.localized_count) for r in records if r.method == method]
                for method in (ClusteringMethod.M1, ClusteringMethod.M3)
            }
            with self.subTest(network=name):
                self.assertEqual(len(by_method[ClusteringMethod.M1]), len(self.SEEDS) * len(self.E_INDICES))
                self.assertEqual(by_method[ClusteringMethod.M1], by_method[ClusteringMethod.M3])

    def test_method2_trails_under_random_error(self):
        trailing = [
            name
            for name in self.records
            if self.mean_pct(name, ClusteringMethod.M2) > self.mean_pct(name, ClusteringMethod.M1)
        ]

        self.assertGreaterEqual(len(trailing), 3, trailing)

    def test_method2_leads_without_error_on_sparsest_network(self):
        self.assertLess(
            self.mean_pct("network1", ClusteringMethod.M2, noisy=False),
            self.mean_pct("network1", ClusteringMethod.M1, noisy=False),
        )
