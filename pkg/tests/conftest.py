"""Shared generators for the seeded randomized test batches.

Graphs come from a generator independent of the package's own random
families so the library is never tested against itself.  Weights are
drawn positive and bounded away from zero: with no sign cancellation
every shortest-walk sum is strictly positive, which keeps the
genericity assumptions satisfied by construction instead of by luck.
"""

from __future__ import annotations

import numpy as np
import pytest

from netfdi import Digraph


def random_digraph(rng: np.random.Generator, n: int, p: float,
                   self_loop_p: float = 0.0) -> Digraph:
    """Directed Bernoulli graph, guaranteed at least one edge."""
    while True:
        mask = rng.random((n, n)) < p
        np.fill_diagonal(mask, False)
        edges = [(int(t) + 1, int(h) + 1)
                 for t, h in np.argwhere(mask)]
        if self_loop_p > 0.0:
            for v in range(1, n + 1):
                if rng.random() < self_loop_p:
                    edges.append((v, v))
        if any(t != h for t, h in edges):
            return Digraph(n, edges)


def random_bidigraph(rng: np.random.Generator, n: int, p: float) -> Digraph:
    """Every kept node pair carries both orientations, marked as one link."""
    while True:
        edges: list[tuple[int, int]] = []
        marked: list[tuple[int, int]] = []
        for t in range(1, n + 1):
            for h in range(t + 1, n + 1):
                if rng.random() < p:
                    edges += [(t, h), (h, t)]
                    marked += [(t, h), (h, t)]
        if edges:
            return Digraph(n, edges, bidirectional=marked)


def positive_weights(g: Digraph, rng: np.random.Generator,
                     low: float = 0.5, high: float = 1.5) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for tail, head in sorted(g.edges):
        a[head - 1, tail - 1] = rng.uniform(low, high)
    return a


def generic_state(rng: np.random.Generator, n: int) -> np.ndarray:
    """Magnitudes in [0.5, 2]: bounded away from accidental orthogonality."""
    return rng.uniform(0.5, 2.0, size=n) * rng.choice([-1.0, 1.0], size=n)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log() -> list[str]:
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # criterion verdicts stay visible even when pytest captures stdout
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
