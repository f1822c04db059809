import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from localization.services.exceptions import TopologyError
from localization.services.geometry import Point2
from localization.services.network import (
    REFERENCE_NETWORKS,
    NetworkConfig,
    anchors_of,
    build_topology,
    calibrate_radius,
    export_topology,
    generate,
    import_topology,
    mean_connectivity,
    read_positions,
)


class NetworkConfigTests(SimpleTestCase):
    def test_invalid_values(self):
        for kwargs in (
            {"width": 0, "height": 1, "node_count": 10, "radius": 0.1},
            {"width": 1, "height": 1, "node_count": 0, "radius": 0.1},
            {"width": 1, "height": 1, "node_count": 10, "radius": 0},
        ):
            with self.subTest(**kwargs), self.assertRaises(ValueError):
                NetworkConfig(**kwargs)

    def test_reference_presets(self):
        self.assertEqual(sorted(REFERENCE_NETWORKS), ["network1", "network2", "network3", "network4"])
        self.assertEqual(REFERENCE_NETWORKS["network1"].literal_radius, 0.04)
        self.assertEqual(REFERENCE_NETWORKS["network4"].mean_connectivity, 13.96)


class TopologyTests(SimpleTestCase):
    def test_close_nodes_are_linked(self):
        topology = build_topology(NetworkConfig(1, 1, 2, 0.04), [Point2(0, 0), Point2(0.03, 0)])

        self.assertEqual(topology.adjacency, ((1,), (0,)))
        self.assertEqual(mean_connectivity(topology), 1.0)
        self.assertEqual(topology.edge_count, 1)

    def test_distant_nodes_are_not_linked(self):
        topology = build_topology(NetworkConfig(1, 1, 2, 0.02), [Point2(0, 0), Point2(0.03, 0)])

        self.assertEqual(topology.adjacency, ((), ()))

    def test_isolated_nodes(self):
        topology = build_topology(NetworkConfig(1, 1, 3, 0.01), [Point2(0, 0), Point2(0.5, 0.5), Point2(1, 1)])

        self.assertEqual(mean_connectivity(topology), 0.0)
        self.assertEqual(anchors_of(topology, 1), [])

    def test_link_at_exact_radius(self):
        topology = build_topology(NetworkConfig(1, 1, 2, 0.5), [Point2(0, 0), Point2(0.5, 0)])

        self.assertEqual(topology.adjacency, ((1,), (0,)))

    def test_anchors_carry_true_distances(self):
        topology = build_topology(
            NetworkConfig(4, 3, 4, 3.2),
            [Point2(1, 1), Point2(0, 0), Point2(4, 0), Point2(0, 3)],
        )

        anchors = anchors_of(topology, 0)

        self.assertEqual([link.anchor for link in anchors], [1, 2, 3])
        for link in anchors:
            self.assertAlmostEqual(link.distance, Point2(1, 1).distance_to(link.position))
            self.assertLessEqual(link.distance, 3.2)

    def test_unknown_node(self):
        topology = build_topology(NetworkConfig(1, 1, 1, 0.1), [Point2(0.5, 0.5)])

        with self.assertRaises(TopologyError):
            anchors_of(topology, 1)

    def test_positions_must_match_config(self):
        with self.assertRaises(TopologyError):
            build_topology(NetworkConfig(1, 1, 2, 0.1), [Point2(0.5, 0.5)])
        with self.assertRaises(TopologyError):
            build_topology(NetworkConfig(1, 1, 1, 0.1), [Point2(1.5, 0.5)])


class GenerateTests(SimpleTestCase):
    def test_same_seed_same_topology(self):
        config = NetworkConfig(1, 1, 100, 0.1, seed=42)

        self.assertEqual(generate(config), generate(config))

    def test_different_seeds_differ(self):
        self.assertNotEqual(
            generate(NetworkConfig(1, 1, 50, 0.1, seed=1)).positions,
            generate(NetworkConfig(1, 1, 50, 0.1, seed=2)).positions,
        )

    def test_invariants_on_generated_networks(self):
        for seed in range(20):
            topology = generate(NetworkConfig(2.0, 0.5, 80, 0.15, seed=seed))
            with self.subTest(seed=seed):
                self.assertEqual(topology.node_count, 80)
                for node, point in enumerate(topology.positions):
                    self.assertTrue(0 <= point.x <= 2.0 and 0 <= point.y <= 0.5)
                    self.assertNotIn(node, topology.adjacency[node])
                    for neighbour in topology.adjacency[node]:
                        self.assertIn(node, topology.adjacency[neighbour])
                        self.assertLessEqual(point.distance_to(topology.positions[neighbour]), 0.15)

    def test_calibrated_radius_reaches_target_mean(self):
        radius = calibrate_radius(1.0, 1.0, 100, 4.582, seeds=range(16))
        means = [mean_connectivity(generate(NetworkConfig(1, 1, 100, radius, seed=seed))) for seed in range(16)]

        self.assertAlmostEqual(sum(means) / len(means), 4.582, delta=0.05)

    def test_calibrated_mean_holds_on_fresh_seeds(self):
        radius = calibrate_radius(1.0, 1.0, 100, 4.582, seeds=range(16))
        means = [mean_connectivity(generate(NetworkConfig(1, 1, 100, radius, seed=seed))) for seed in range(100, 300)]

        self.assertAlmostEqual(sum(means) / len(means), 4.58, delta=0.4)

    def test_calibration_rejects_impossible_target(self):
        with self.assertRaises(ValueError):
            calibrate_radius(1.0, 1.0, 10, 9.5)


class TopologyFilesTests(SimpleTestCase):
    def test_export_and_import(self):
        topology = generate(NetworkConfig(1, 1, 30, 0.3, seed=5))
        with tempfile.TemporaryDirectory() as directory:
            json_path, csv_path = export_topology(topology, Path(directory))

            header = json.loads(json_path.read_text(encoding="utf-8"))
            restored = import_topology(json_path)

        self.assertEqual(header["positions"], "topology.csv")
        self.assertEqual(header["config"]["seed"], 5)
        self.assertEqual(restored, topology)

    def test_export_is_stable(self):
        topology = generate(NetworkConfig(1, 1, 30, 0.3, seed=5))
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            export_topology(topology, Path(first))
            export_topology(topology, Path(second))
            for name in ("topology.json", "topology.csv"):
                self.assertEqual((Path(first) / name).read_bytes(), (Path(second) / name).read_bytes())

    def test_positions_header_required(self):
        with self.assertRaises(TopologyError):
            read_positions(["id,x,y", "0,0.1,0.2"])

    def test_positions_ids_must_be_consecutive(self):
        with self.assertRaises(TopologyError):
            read_positions(["node_id,x,y", "0,0.1,0.2", "2,0.3,0.4"])

    def test_malformed_header_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "topology.json"
            path.write_text(json.dumps({"config": {"width": 1}}), encoding="utf-8")
            with self.assertRaises(TopologyError):
                import_topology(path)
