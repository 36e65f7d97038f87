"""Greedy and exhaustive sensor placement for detection and isolation."""

from __future__ import annotations

import math

import numpy as np
import pytest

from netfdi import (
    ApproximationReport,
    DetectionInfeasible,
    Digraph,
    EdgeClass,
    IsolationEmpty,
    RelationIndex,
    SensorSet,
    approximation_report,
    build_relation_index,
    count_undetected,
    count_unresolved,
    exhaustive_detection,
    exhaustive_isolation,
    greedy_detection,
    greedy_isolation,
    placement_json_dict,
)

from conftest import random_bidigraph, random_digraph

P4 = Digraph(4, [(1, 2), (2, 3), (3, 4)])
C5 = Digraph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])
K3_EDGES = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]
K3_BIDI = Digraph(3, K3_EDGES, bidirectional=K3_EDGES)
IN_STAR = Digraph(3, [(2, 1), (3, 1)])


def synthetic_index(orders: np.ndarray) -> RelationIndex:
    classes = tuple(EdgeClass(1, c + 2, False) for c in range(orders.shape[0]))
    return RelationIndex(classes, orders.shape[1], int(orders.max(initial=1)),
                         orders.astype(np.int16))


class TestSensorSet:
    def test_residual_shape_validation(self):
        SensorSet((1, 2), (3, 0))
        SensorSet((1, 2), (0,), seed_size=1)
        with pytest.raises(ValueError, match="one residual"):
            SensorSet((1, 2), (3, 1, 0))


class TestGreedyDetection:
    def test_cycle_frozen(self):
        # node 1 sees every class except its own outgoing edge
        result = greedy_detection(build_relation_index(C5))
        assert result.nodes == (1, 2)
        assert result.residuals == (1, 0)

    def test_in_star_single_sensor(self):
        result = greedy_detection(build_relation_index(IN_STAR))
        assert result.nodes == (1,)
        assert result.residuals == (0,)

    def test_synthetic_invisible_class(self):
        orders = np.array([[1, 0, 2], [0, 0, 0]])
        result = greedy_detection(synthetic_index(orders))
        assert isinstance(result, DetectionInfeasible)
        assert result.residual == 1
        assert result.undetectable[0].head == 3

    def test_residuals_strictly_decrease(self, rng):
        for _ in range(15):
            n = int(rng.integers(3, 9))
            g = random_digraph(rng, n, 0.3)
            result = greedy_detection(build_relation_index(g))
            assert isinstance(result, SensorSet)
            path = (count_undetected(build_relation_index(g), []),
                    *result.residuals)
            assert all(a > b for a, b in zip(path, path[1:]))
            assert result.residuals[-1] == 0


class TestGreedyIsolation:
    def test_path_needs_one_interior_node(self):
        result = greedy_isolation(build_relation_index(P4))
        assert result.nodes == (3,)
        assert result.residuals == (0,)

    def test_seed_already_sufficient(self):
        result = greedy_isolation(build_relation_index(P4), seed=(4,))
        assert result.nodes == (4,)
        assert result.residuals == ()
        assert result.seed_size == 1

    def test_detection_set_as_seed(self):
        idx = build_relation_index(C5)
        detection = greedy_detection(idx)
        result = greedy_isolation(idx, seed=detection)
        assert result.nodes[:2] == detection.nodes
        assert count_unresolved(idx, result.nodes) == 0

    def test_duplicate_seed_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            greedy_isolation(build_relation_index(P4), seed=(1, 1))

    def test_in_star_is_empty(self):
        # both in-edges of the hub look identical from everywhere
        result = greedy_isolation(build_relation_index(IN_STAR))
        assert isinstance(result, IsolationEmpty)
        assert result.nodes == ()
        assert result.residual_all_nodes == 2
        assert result.grown == (1, 2, 3)
        assert result.grown_residuals == (2, 2, 2)


class TestExhaustive:
    def test_triangle_detection_needs_two(self):
        idx = build_relation_index(K3_BIDI)
        best = exhaustive_detection(idx)
        assert best.nodes == (1, 2)
        greedy = greedy_detection(idx)
        assert len(greedy.nodes) == len(best.nodes)

    def test_infeasible_detection(self):
        orders = np.array([[0, 0, 0]])
        result = exhaustive_detection(synthetic_index(orders))
        assert isinstance(result, DetectionInfeasible)

    def test_empty_isolation(self):
        result = exhaustive_isolation(build_relation_index(IN_STAR))
        assert isinstance(result, IsolationEmpty)
        assert result.residual_all_nodes == 2
        assert result.grown == ()

    def test_size_guard(self):
        g = random_digraph(np.random.default_rng(3), 17, 0.2)
        with pytest.raises(ValueError, match="limited"):
            exhaustive_detection(build_relation_index(g))

    def test_greedy_never_beats_exhaustive(self, rng):
        for trial in range(12):
            n = int(rng.integers(3, 7))
            if trial % 2 == 0:
                g = random_digraph(rng, n, 0.4)
            else:
                g = random_bidigraph(rng, n, 0.5)
            idx = build_relation_index(g)
            g_det = greedy_detection(idx)
            e_det = exhaustive_detection(idx)
            assert isinstance(g_det, SensorSet) == isinstance(e_det, SensorSet)
            if isinstance(g_det, SensorSet):
                assert len(g_det.nodes) >= len(e_det.nodes)
                report = approximation_report(
                    g_det, e_det, len(g.failure_targets))
                assert report.within_bound
            g_iso = greedy_isolation(idx)
            e_iso = exhaustive_isolation(idx)
            assert isinstance(g_iso, SensorSet) == isinstance(e_iso, SensorSet)
            if isinstance(g_iso, SensorSet):
                assert len(g_iso.nodes) >= len(e_iso.nodes)


class TestApproximationReport:
    def test_ratio_and_bound(self):
        report = ApproximationReport(greedy_size=3, optimal_size=2,
                                     target_count=7)
        assert report.ratio == pytest.approx(1.5)
        assert report.bound == pytest.approx(1.0 + math.log(7))
        assert report.within_bound

    def test_zero_optimum(self):
        assert ApproximationReport(0, 0, 5).ratio == 1.0
        degenerate = ApproximationReport(1, 0, 5)
        assert math.isinf(degenerate.ratio)
        assert not degenerate.within_bound

    def test_tiny_target_count(self):
        assert ApproximationReport(1, 1, 0).bound == 1.0


class TestJsonDocument:
    def test_feasible(self):
        doc = placement_json_dict(SensorSet((1, 2), (1, 0)), max_order=3,
                                  target_count=5)
        assert doc["sensors"] == [1, 2]
        assert doc["residuals"] == [1, 0]
        assert doc["feasible"] is True
        assert doc["z"] == 3
        assert doc["ratio_bound"] == pytest.approx(1.0 + math.log(5))

    def test_infeasible(self):
        doc = placement_json_dict(
            DetectionInfeasible((EdgeClass(1, 2, False),)), 3, 5)
        assert doc["sensors"] == []
        assert doc["feasible"] is False
