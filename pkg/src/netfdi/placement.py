"""Near-minimal sensor sets for failure detection and isolation.

Both objectives count bad classes and shrink as sensors are added:
``count_undetected`` for detection, ``count_unresolved`` for isolation.
The greedy routines add the node with the best marginal improvement
(ties broken toward the smallest node id) until the objective hits zero.
Set-cover theory bounds greedy detection at (1 + ln(number of failure
targets)) times the optimum; exhaustive oracles below verify that on
small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .relations import EdgeClass, RelationIndex, count_undetected, count_unresolved

EXHAUSTIVE_LIMIT = 16


@dataclass(frozen=True)
class SensorSet:
    """Sensor nodes in the order they were committed.

    ``residuals[i]`` is the objective value after ``nodes[seed_size + i]``
    joined; greedy construction guarantees those values strictly
    decrease.  Seed nodes (``seed_size`` of them, listed first) were
    inherited rather than chosen, so they carry no residual entries.
    """

    nodes: tuple[int, ...]
    residuals: tuple[int, ...]
    seed_size: int = 0

    def __post_init__(self):
        if len(self.residuals) != len(self.nodes) - self.seed_size:
            raise ValueError("one residual per chosen (non-seed) node")


@dataclass(frozen=True)
class DetectionInfeasible:
    """Some classes are invisible to every node; placement cannot help."""

    undetectable: tuple[EdgeClass, ...]

    @property
    def residual(self) -> int:
        return len(self.undetectable)


@dataclass(frozen=True)
class IsolationEmpty:
    """Isolation is impossible even observing everything.

    The headline result is the empty set; ``grown`` and
    ``grown_residuals`` record the best-effort greedy path through all
    nodes, and ``residual_all_nodes`` is the unresolved-class count with
    every node observed.
    """

    residual_all_nodes: int
    grown: tuple[int, ...]
    grown_residuals: tuple[int, ...]

    @property
    def nodes(self) -> tuple[int, ...]:
        return ()


def greedy_detection(idx: RelationIndex) -> SensorSet | DetectionInfeasible:
    """Grow a detection set; infeasibility is reported, never looped on."""
    n_classes = len(idx.classes)
    visible = idx.orders > 0  # (classes, nodes)
    if n_classes and not visible.any(axis=1).all():
        missing = tuple(cls for c, cls in enumerate(idx.classes)
                        if not visible[c].any())
        return DetectionInfeasible(missing)
    chosen: list[int] = []
    residuals: list[int] = []
    uncovered = np.ones(n_classes, dtype=bool)
    in_set = np.zeros(idx.n, dtype=bool)
    while uncovered.any():
        gains = visible[uncovered].sum(axis=0)
        gains[in_set] = -1
        node = int(np.argmax(gains))  # first max = smallest node id
        in_set[node] = True
        uncovered &= ~visible[:, node]
        chosen.append(node + 1)
        residuals.append(int(uncovered.sum()))
    return SensorSet(tuple(chosen), tuple(residuals))


def greedy_isolation(idx: RelationIndex,
                     seed: SensorSet | Iterable[int] = ()
                     ) -> SensorSet | IsolationEmpty:
    """Grow an isolation set on top of a seed (typically the detection set).

    Follows the published loop to the letter: keep adding the best node
    until nothing is unresolved or every node is a sensor.  If the full
    node set still leaves classes unresolved the paper's answer is the
    empty set; the best-effort path is attached for reporting.
    """
    seed_nodes = tuple(seed.nodes) if isinstance(seed, SensorSet) else tuple(
        int(p) for p in seed)
    if len(set(seed_nodes)) != len(seed_nodes):
        raise ValueError("seed contains duplicate nodes")
    members = list(seed_nodes)
    residuals: list[int] = []
    current = count_unresolved(idx, members)
    while current != 0 and len(members) < idx.n:
        best_node = -1
        best_value = None
        for p in range(1, idx.n + 1):
            if p in members:
                continue
            value = count_unresolved(idx, members + [p])
            if best_value is None or value < best_value:
                best_value = value
                best_node = p
        members.append(best_node)
        residuals.append(int(best_value))
        current = best_value
    if current == 0:
        return SensorSet(tuple(members), tuple(residuals), len(seed_nodes))
    return IsolationEmpty(int(current), tuple(members), tuple(residuals))


def _exhaustive(idx: RelationIndex, objective) -> tuple[int, ...] | None:
    """Smallest node set driving the objective to zero, or None."""
    if idx.n > EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"exhaustive search limited to n <= {EXHAUSTIVE_LIMIT}")
    if objective(idx, range(1, idx.n + 1)) != 0:
        return None
    for size in range(0, idx.n + 1):
        for combo in combinations(range(1, idx.n + 1), size):
            if objective(idx, combo) == 0:
                return combo
    return None  # unreachable: the full set succeeded above


def _cumulative(idx: RelationIndex, nodes: tuple[int, ...], objective
                ) -> tuple[int, ...]:
    return tuple(objective(idx, nodes[:i + 1]) for i in range(len(nodes)))


def exhaustive_detection(idx: RelationIndex) -> SensorSet | DetectionInfeasible:
    best = _exhaustive(idx, count_undetected)
    if best is None:
        visible = idx.orders > 0
        missing = tuple(cls for c, cls in enumerate(idx.classes)
                        if not visible[c].any())
        return DetectionInfeasible(missing)
    return SensorSet(best, _cumulative(idx, best, count_undetected))


def exhaustive_isolation(idx: RelationIndex) -> SensorSet | IsolationEmpty:
    best = _exhaustive(idx, count_unresolved)
    if best is None:
        return IsolationEmpty(count_unresolved(idx, range(1, idx.n + 1)),
                              (), ())
    return SensorSet(best, _cumulative(idx, best, count_unresolved))


@dataclass(frozen=True)
class ApproximationReport:
    greedy_size: int
    optimal_size: int
    target_count: int

    @property
    def ratio(self) -> float:
        if self.optimal_size == 0:
            return 1.0 if self.greedy_size == 0 else math.inf
        return self.greedy_size / self.optimal_size

    @property
    def bound(self) -> float:
        return 1.0 + math.log(max(self.target_count, 1))

    @property
    def within_bound(self) -> bool:
        return self.ratio <= self.bound + 1e-12


def approximation_report(greedy: SensorSet, optimal: SensorSet,
                         target_count: int) -> ApproximationReport:
    """Compare a greedy set against an exhaustive optimum.

    ``target_count`` is the number of failure targets (classes counted
    with both orientations, i.e. edges excluding self-loops); the greedy
    guarantee is 1 + ln of that.
    """
    return ApproximationReport(len(greedy.nodes), len(optimal.nodes),
                               int(target_count))


def placement_json_dict(detection: SensorSet | DetectionInfeasible,
                        max_order: int,
                        target_count: int) -> dict:
    """The placement result document emitted by the CLI."""
    feasible = isinstance(detection, SensorSet)
    sensors = list(detection.nodes) if feasible else []
    residuals = list(detection.residuals) if feasible else []
    return {
        "sensors": sensors,
        "residuals": residuals,
        "feasible": feasible,
        "ratio_bound": 1.0 + math.log(max(target_count, 1)),
        "z": max_order,
    }
