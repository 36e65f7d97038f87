"""Seeded random network families used by the experiments.

Every generator takes an explicit seed and derives a single PRNG from it,
so instances are reproducible and two families fed the same seed share
their randomness where that matters (paired comparisons).

Weight rules:

* ``unit``      - weight 1.0 on every edge;
* ``uniform``   - independent U(0.5, 1.5) per directed edge, drawn in
                  sorted edge order (generic weights);
* ``laplacian`` - unit coupling with a self-loop added on every node
                  that has inputs, carrying minus the in-degree, so all
                  row sums are zero (consensus-style dynamics).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Digraph, Edge, in_weighting

WEIGHT_RULES = ("unit", "uniform", "laplacian")


def _finalize(n: int, edges: set[Edge], bidirectional: set[Edge],
              weight_rule: str, rng: np.random.Generator
              ) -> tuple[Digraph, np.ndarray]:
    if weight_rule not in WEIGHT_RULES:
        raise ValueError(f"unknown weight rule {weight_rule!r}")
    a = np.zeros((n, n))
    if weight_rule == "laplacian":
        loops = {(v, v) for v in range(1, n + 1)
                 if any(head == v for _, head in edges)}
        edges = edges | loops
        for tail, head in edges:
            if tail != head:
                a[head - 1, tail - 1] = 1.0
        np.fill_diagonal(a, -a.sum(axis=1))
    else:
        for tail, head in sorted(edges):
            a[head - 1, tail - 1] = (1.0 if weight_rule == "unit"
                                     else rng.uniform(0.5, 1.5))
    g = Digraph(n, edges, bidirectional)
    return g, in_weighting(g, a)


def erdos_renyi(n: int, p: float, directed: bool = True, seed=0,
                weight_rule: str = "uniform") -> tuple[Digraph, np.ndarray]:
    """Independent edges with probability p; undirected graphs come back
    as marked bidirectional pairs."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("edge probability must sit in [0, 1]")
    rng = np.random.default_rng(seed)
    edges: set[Edge] = set()
    bidi: set[Edge] = set()
    if directed:
        draws = rng.random((n, n))
        for tail in range(1, n + 1):
            for head in range(1, n + 1):
                if tail != head and draws[tail - 1, head - 1] < p:
                    edges.add((tail, head))
    else:
        for u in range(1, n + 1):
            for v in range(u + 1, n + 1):
                if rng.random() < p:
                    edges.add((u, v))
                    edges.add((v, u))
                    bidi.add((u, v))
                    bidi.add((v, u))
    return _finalize(n, edges, bidi, weight_rule, rng)


def _geometric_points(n: int, side: float, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, side, size=(n, 2))


def _pairwise_distances(points: np.ndarray) -> np.ndarray:
    # one shared formula: the radius tuner and the generator must agree
    # bitwise or boundary pairs flip on the last ulp
    diffs = points[:, None, :] - points[None, :, :]
    return np.hypot(diffs[:, :, 0], diffs[:, :, 1])


def radius_for_edge_count(n: int, edges: int, side: float = 1.0,
                          seed=0) -> float:
    """Connection radius hitting an exact undirected edge count.

    The points are a deterministic function of the seed, so the radius
    is simply the edges-th smallest pairwise distance.
    """
    points = _geometric_points(n, side, seed)
    upper = _pairwise_distances(points)[np.triu_indices(n, k=1)]
    if not (1 <= edges <= upper.size):
        raise ValueError(f"edge count must sit in 1..{upper.size}")
    return float(np.sort(upper)[edges - 1])


def random_geometric(n: int, radius: float, side: float = 1.0, seed=0,
                     weight_rule: str = "uniform") -> tuple[Digraph, np.ndarray]:
    """Uniform points in a square, linked (bidirectionally) within radius."""
    rng = np.random.default_rng(seed)
    # first draw matches _geometric_points, so radius_for_edge_count agrees
    points = rng.uniform(0.0, side, size=(n, 2))
    dists = _pairwise_distances(points)
    edges: set[Edge] = set()
    bidi: set[Edge] = set()
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if dists[u - 1, v - 1] <= radius:
                edges.add((u, v))
                edges.add((v, u))
                bidi.add((u, v))
                bidi.add((v, u))
    return _finalize(n, edges, bidi, weight_rule, rng)


def strip_bidirectional(g: Digraph) -> Digraph:
    """Same edges, no pairing: each orientation fails on its own."""
    return Digraph(g.n, g.edges, ())


def random_orientation(g: Digraph, seed=0) -> Digraph:
    """Keep one fair-coin orientation of every bidirectional pair."""
    rng = np.random.default_rng(seed)
    edges = set(g.edges)
    for tail, head in sorted(g.bidirectional):
        if tail > head or (tail, head) not in edges:
            continue
        drop = (tail, head) if rng.random() < 0.5 else (head, tail)
        edges.discard(drop)
    return Digraph(g.n, edges, ())


def restrict_weights(g: Digraph, a: np.ndarray) -> np.ndarray:
    """Project a weight matrix onto a subgraph's edges (orientation picks)."""
    a = np.asarray(a, dtype=np.float64)
    out = np.zeros_like(a)
    for tail, head in g.edges:
        out[head - 1, tail - 1] = a[head - 1, tail - 1]
    return in_weighting(g, out)


def watts_strogatz(n: int, d: int, rewire_p: float, seed=0,
                   weight_rule: str = "uniform") -> tuple[Digraph, np.ndarray]:
    """Ring of d nearest neighbors with per-edge random rewiring.

    Every node starts linked to its d/2 neighbors on each side.  Each
    original edge is visited once from its lower endpoint and, with the
    given probability, re-targeted to a uniformly random node currently
    non-adjacent to the kept endpoint.  Edge count n*d/2 is invariant and
    no duplicates or self-loops can appear.
    """
    if d % 2 != 0 or d < 2:
        raise ValueError("degree d must be even and at least 2")
    if d > n - 2 and not (n % 2 == 1 and d == n - 1):
        raise ValueError("degree d too large for the ring size")
    if not (0.0 <= rewire_p <= 1.0):
        raise ValueError("rewiring probability must sit in [0, 1]")
    rng = np.random.default_rng(seed)
    pairs: set[tuple[int, int]] = set()
    for u in range(n):
        for off in range(1, d // 2 + 1):
            v = (u + off) % n
            pairs.add((min(u, v) + 1, max(u, v) + 1))
    assert len(pairs) == n * d // 2

    neighbors: dict[int, set[int]] = {v: set() for v in range(1, n + 1)}
    for u, v in pairs:
        neighbors[u].add(v)
        neighbors[v].add(u)

    for u in range(1, n + 1):
        for off in range(1, d // 2 + 1):
            v0 = (u - 1 + off) % n + 1
            key = (min(u, v0), max(u, v0))
            if key not in pairs:
                continue  # already rewired away from the other side
            if rng.random() >= rewire_p:
                continue
            candidates = [r for r in range(1, n + 1)
                          if r != u and r not in neighbors[u]]
            if not candidates:
                continue
            target = candidates[rng.integers(len(candidates))]
            pairs.discard(key)
            neighbors[u].discard(v0)
            neighbors[v0].discard(u)
            pairs.add((min(u, target), max(u, target)))
            neighbors[u].add(target)
            neighbors[target].add(u)

    edges: set[Edge] = set()
    bidi: set[Edge] = set()
    for u, v in pairs:
        edges.add((u, v))
        edges.add((v, u))
        bidi.add((u, v))
        bidi.add((v, u))
    return _finalize(n, edges, bidi, weight_rule, rng)


@dataclass(frozen=True)
class GenSpec:
    """Declarative description of one random instance, for sweeps and CLI."""

    family: str  # "erdos_renyi" | "geometric" | "small_world"
    n: int
    seed: int = 0
    weight_rule: str = "uniform"
    p: float | None = None
    directed: bool = True
    radius: float | None = None
    side: float = 1.0
    d: int | None = None
    rewire_p: float | None = None

    def generate(self) -> tuple[Digraph, np.ndarray]:
        if self.family == "erdos_renyi":
            if self.p is None:
                raise ValueError("erdos_renyi needs p")
            return erdos_renyi(self.n, self.p, self.directed, self.seed,
                               self.weight_rule)
        if self.family == "geometric":
            if self.radius is None:
                raise ValueError("geometric needs radius")
            return random_geometric(self.n, self.radius, self.side, self.seed,
                                    self.weight_rule)
        if self.family == "small_world":
            if self.d is None or self.rewire_p is None:
                raise ValueError("small_world needs d and rewire_p")
            return watts_strogatz(self.n, self.d, self.rewire_p, self.seed,
                                  self.weight_rule)
        raise ValueError(f"unknown family {self.family!r}")
