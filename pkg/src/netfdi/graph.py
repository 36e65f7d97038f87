"""Weighted directed networks, hop distances, and walk-weight sums.

A network of n single-integrator agents is a directed graph on nodes
1..n together with an in-weighting matrix ``a`` where ``a[p-1, q-1]``
is the gain the head node p applies to the tail node q along the edge
(q, p).  The dynamics downstream of this module are xdot = a x + b w.

Distances are hop counts: edge weights never shorten or lengthen a
path.  A length-k walk contributes the product of its edge weights, and
the sum of those products over all q -> p walks of length k equals the
(p, q) entry of the k-th matrix power.  That identity is the basis of
everything else in the package, so an explicit depth-first enumeration
oracle is kept next to the matrix-power route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from . import kernels

NodeId = int  # 1-based
Edge = tuple[int, int]  # (tail, head)

ENUMERATION_LIMIT = 12  # walk enumeration is exponential; refuse beyond this


class GraphFileError(ValueError):
    """Malformed edge-list file; carries the offending line number if known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ScaleGuardError(ValueError):
    """An exponential-cost oracle was asked to run beyond its size guard."""


def _as_edge(item: object) -> Edge:
    tail, head = item  # type: ignore[misc]
    return (int(tail), int(head))


@dataclass(frozen=True)
class Digraph:
    """Directed graph on nodes 1..n with an optional bidirectional marking.

    ``bidirectional`` lists the ordered edges that fail together with
    their reverses (physically severed cables); it must be closed under
    reversal and may not contain self-loops.  Self-loops are otherwise
    legal: they take part in walks but are never failure targets.
    """

    n: int
    edges: frozenset[Edge]
    bidirectional: frozenset[Edge] = field(default_factory=frozenset)

    def __init__(self, n: int, edges: Iterable[Edge],
                 bidirectional: Iterable[Edge] = ()):
        if n < 1:
            raise ValueError("a network needs at least one node")
        edge_list = [_as_edge(e) for e in edges]
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            raise ValueError("duplicate edges in edge list")
        bidi_set = frozenset(_as_edge(e) for e in bidirectional)
        for tail, head in edge_set:
            if not (1 <= tail <= n and 1 <= head <= n):
                raise ValueError(f"edge ({tail}, {head}) leaves node range 1..{n}")
        for tail, head in bidi_set:
            if (tail, head) not in edge_set:
                raise ValueError(f"bidirectional mark on absent edge ({tail}, {head})")
            if tail == head:
                raise ValueError(f"self-loop ({tail}, {head}) cannot be bidirectional")
            if (head, tail) not in bidi_set:
                raise ValueError(
                    f"bidirectional edge ({tail}, {head}) lacks its marked reverse")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "edges", edge_set)
        object.__setattr__(self, "bidirectional", bidi_set)

    @cached_property
    def self_loops(self) -> frozenset[Edge]:
        return frozenset(e for e in self.edges if e[0] == e[1])

    @cached_property
    def failure_targets(self) -> frozenset[Edge]:
        """Edges that can fail: everything except self-loops."""
        return self.edges - self.self_loops

    def has_edge(self, tail: int, head: int) -> bool:
        return (tail, head) in self.edges

    def in_edges(self, head: int) -> list[Edge]:
        return sorted(e for e in self.edges if e[1] == head)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency, row = tail, col = head (0-based)."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        for tail, head in self.edges:
            adj[tail - 1, head - 1] = True
        adj.setflags(write=False)
        return adj

    @cached_property
    def distances(self) -> "DistanceTable":
        return all_pairs_distances(self)


@dataclass(frozen=True)
class DistanceTable:
    """Hop distances between all node pairs; unreachable pairs are inf."""

    hops: np.ndarray  # (n, n) float64; hops[q-1, p-1] = dist q -> p

    def dist(self, q: int, p: int) -> float:
        return float(self.hops[q - 1, p - 1])

    @property
    def has_unreachable_pairs(self) -> bool:
        return bool(np.isinf(self.hops).any())

    def finite_max(self) -> int:
        finite = self.hops[np.isfinite(self.hops)]
        return int(finite.max())


@dataclass(frozen=True)
class Diameter:
    """Longest finite hop distance plus a reachability caveat flag."""

    value: int
    has_unreachable_pairs: bool


def all_pairs_distances(g: Digraph) -> DistanceTable:
    """BFS hop counts from every node; weights are deliberately ignored."""
    raw = kernels.all_pairs_hops(g.adjacency)
    hops = raw.astype(np.float64)
    hops[raw < 0] = np.inf
    hops.setflags(write=False)
    return DistanceTable(hops)


def diameter(g: Digraph) -> Diameter:
    table = g.distances
    return Diameter(table.finite_max(), table.has_unreachable_pairs)


def default_max_order(g: Digraph) -> int:
    """Derivative-order budget: diameter + 1, or n when pairs are unreachable.

    Any failure that shows up at a node at all shows up by this order, so
    scanning further buys nothing.
    """
    d = diameter(g)
    return g.n if d.has_unreachable_pairs else d.value + 1


# --- in-weighting matrices ---


def check_in_weighting(g: Digraph, a: np.ndarray) -> None:
    """Reject weight matrices that put mass on absent edges.

    Zero weights on present edges are structurally legal (the genericity
    check below will flag the trouble they cause).
    """
    a = np.asarray(a)
    if a.shape != (g.n, g.n):
        raise ValueError(f"weight matrix must be {g.n}x{g.n}, got {a.shape}")
    offenders = []
    nonzero = np.argwhere(a != 0.0)
    for row, col in nonzero:
        if (col + 1, row + 1) not in g.edges:
            offenders.append((int(col + 1), int(row + 1)))
    if offenders:
        raise ValueError(f"weights on absent edges (tail, head): {offenders}")


def in_weighting(g: Digraph, a: np.ndarray) -> np.ndarray:
    """Validated, read-only float64 copy of an in-weighting matrix."""
    a = np.array(a, dtype=np.float64)
    check_in_weighting(g, a)
    a.setflags(write=False)
    return a


# --- walk-weight sums ---


class MatrixPowerCache:
    """Powers a^0..a^k grown on demand by repeated right-multiplication.

    Pre- and post-failure matrices must go through the same recursion so
    that entries which agree mathematically also agree bitwise; the
    zero-below-distance checks rely on those differences being exact.
    """

    def __init__(self, a: np.ndarray):
        a = np.ascontiguousarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        self._a = a
        self._powers = [np.eye(a.shape[0])]

    def power(self, k: int) -> np.ndarray:
        if k < 0:
            raise ValueError("power must be nonnegative")
        while len(self._powers) <= k:
            self._powers.append(self._powers[-1] @ self._a)
        return self._powers[k]


def walk_weight_sum(a: np.ndarray, k: int, q: int, p: int,
                    powers: MatrixPowerCache | None = None) -> float:
    """Sum of weight products over all length-k walks q -> p.

    Equals the (p, q) entry of the k-th matrix power; k = 0 gives the
    identity (1.0 when q == p, else 0.0).
    """
    if k < 0:
        raise ValueError("walk length must be nonnegative")
    if powers is None:
        powers = MatrixPowerCache(np.asarray(a, dtype=np.float64))
    return float(powers.power(k)[p - 1, q - 1])


def walk_weight_sum_enumerated(g: Digraph, a: np.ndarray, k: int,
                               q: int, p: int) -> float:
    """Depth-first enumeration oracle for ``walk_weight_sum``.

    Walks every q -> p edge sequence of length exactly k and adds up the
    weight products.  Exponential in k, so guarded to small instances;
    exists to keep the matrix-power route honest.
    """
    if g.n > ENUMERATION_LIMIT or k > ENUMERATION_LIMIT:
        raise ScaleGuardError(
            f"walk enumeration limited to n <= {ENUMERATION_LIMIT} and "
            f"k <= {ENUMERATION_LIMIT}")
    if k < 0:
        raise ValueError("walk length must be nonnegative")
    a = np.asarray(a, dtype=np.float64)
    out_neighbors: list[list[int]] = [[] for _ in range(g.n + 1)]
    for tail, head in sorted(g.edges):
        out_neighbors[tail].append(head)

    total = 0.0

    def descend(node: int, remaining: int, product: float) -> None:
        nonlocal total
        if remaining == 0:
            if node == p:
                total += product
            return
        for nxt in out_neighbors[node]:
            descend(nxt, remaining - 1, product * a[nxt - 1, node - 1])

    descend(q, k, 1.0)
    return total


# --- genericity of shortest-walk sums ---


@dataclass(frozen=True)
class GenericityReport:
    """Pairs (q, p) whose shortest-walk weight sum is numerically zero."""

    violations: tuple[tuple[int, int], ...]
    tol: float

    @property
    def holds(self) -> bool:
        return not self.violations


def check_shortest_walk_sums(g: Digraph, a: np.ndarray,
                             tol: float = 1e-9) -> GenericityReport:
    """Verify every reachable pair keeps a nonzero shortest-walk sum.

    When the sum of weight products over the shortest q -> p walks
    cancels to zero, the first-derivative-jump fingerprints downstream
    lose that pair; such weight choices are non-generic and get reported
    here rather than silently accepted.
    """
    a = np.asarray(a, dtype=np.float64)
    table = g.distances
    powers = MatrixPowerCache(a)
    violations = []
    for q in range(1, g.n + 1):
        for p in range(1, g.n + 1):
            d = table.dist(q, p)
            if not math.isfinite(d):
                continue
            if abs(powers.power(int(d))[p - 1, q - 1]) <= tol:
                violations.append((q, p))
    return GenericityReport(tuple(violations), tol)


# --- edge-list file format ---
#
#   # comment
#   n 5
#   1 2 0.8
#   2 3 1.1 b
#   3 2 0.9 b
#
# Header line gives the node count; each edge line is "tail head weight"
# with an optional trailing "b" marking the edge (and its reverse, which
# must also be marked) as a bidirectional pair.


def load_edge_list(path: str) -> tuple[Digraph, np.ndarray]:
    """Parse the edge-list format; errors carry 1-based line numbers."""
    n: int | None = None
    entries: dict[Edge, float] = {}
    edge_lines: dict[Edge, int] = {}
    bidi: list[Edge] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if n is None:
                if len(parts) != 2 or parts[0] != "n":
                    raise GraphFileError("expected header 'n <count>'", lineno)
                try:
                    n = int(parts[1])
                except ValueError:
                    raise GraphFileError(f"bad node count {parts[1]!r}", lineno)
                if n < 1:
                    raise GraphFileError("node count must be positive", lineno)
                continue
            if len(parts) not in (3, 4):
                raise GraphFileError(
                    "expected 'tail head weight [b]'", lineno)
            try:
                tail, head = int(parts[0]), int(parts[1])
                weight = float(parts[2])
            except ValueError:
                raise GraphFileError(f"bad edge line {text!r}", lineno)
            if len(parts) == 4:
                if parts[3] != "b":
                    raise GraphFileError(
                        f"unknown edge flag {parts[3]!r}", lineno)
                bidi.append((tail, head))
            edge = (tail, head)
            if edge in entries:
                raise GraphFileError(
                    f"duplicate edge ({tail}, {head}), first seen on line "
                    f"{edge_lines[edge]}", lineno)
            entries[edge] = weight
            edge_lines[edge] = lineno
    if n is None:
        raise GraphFileError("missing header 'n <count>'")
    try:
        g = Digraph(n, entries.keys(), bidi)
    except ValueError as exc:
        raise GraphFileError(str(exc)) from exc
    a = np.zeros((n, n))
    for (tail, head), weight in entries.items():
        a[head - 1, tail - 1] = weight
    return g, in_weighting(g, a)


def save_edge_list(path: str, g: Digraph, a: np.ndarray) -> None:
    a = np.asarray(a, dtype=np.float64)
    check_in_weighting(g, a)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {g.n}\n")
        for tail, head in sorted(g.edges):
            weight = float(a[head - 1, tail - 1])
            flag = " b" if (tail, head) in g.bidirectional else ""
            fh.write(f"{tail} {head} {weight!r}{flag}\n")
