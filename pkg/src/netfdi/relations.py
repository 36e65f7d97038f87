"""Edge classes and the node/class first-jump-order index.

Failures are told apart by which derivative order first jumps at which
node.  For a single failed edge (q, r) a sensor at p sees its first jump
at order k exactly when dist(q, p) = k and dist(r, p) = k - 1; for a
severed bidirectional pair either orientation may supply that pattern.
Collecting those orders per node gives each failure class a fingerprint.

Classes: the two orientations of a marked bidirectional pair fail
together and are merged into one class; every other (non-self-loop) edge
is its own class.  Self-loops are excluded outright.

The rule is structural, not dynamic.  A bidirectional pair whose
endpoints sit at equal distance from p gets no order although the
failure does physically jump at that distance plus one, and a single
edge whose tail reaches p by a shortcut (dist(q, p) <= dist(r, p)) gets
no order although the failure still jumps at dist(r, p) + 1.  The index
keeps the structural rule (which is what the placement guarantees are
built on) and the test suite measures the gap instead of papering over
it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import Digraph, DistanceTable, Edge, default_max_order

RELATIONS_SCHEMA_TAG = "netfdi-relations-v1"


@dataclass(frozen=True)
class EdgeClass:
    """One failure class: a directed edge or a bidirectional pair.

    ``tail``/``head`` name the lexicographically smaller orientation so
    ids are stable regardless of construction order.
    """

    tail: int
    head: int
    bidirectional: bool

    @property
    def members(self) -> tuple[Edge, ...]:
        if self.bidirectional:
            return ((self.tail, self.head), (self.head, self.tail))
        return ((self.tail, self.head),)

    def contains(self, edge: Edge) -> bool:
        return edge in self.members

    def label(self) -> str:
        mark = "<->" if self.bidirectional else "->"
        return f"{self.tail}{mark}{self.head}"


def edge_classes(g: Digraph) -> tuple[EdgeClass, ...]:
    """Partition the failure targets into classes, sorted by representative."""
    seen: set[Edge] = set()
    classes: list[EdgeClass] = []
    for edge in sorted(g.failure_targets):
        if edge in seen:
            continue
        tail, head = edge
        if edge in g.bidirectional:
            rep = min(edge, (head, tail))
            classes.append(EdgeClass(rep[0], rep[1], True))
            seen.add(edge)
            seen.add((head, tail))
        else:
            classes.append(EdgeClass(tail, head, False))
            seen.add(edge)
    return tuple(classes)


@dataclass(frozen=True)
class RelationIndex:
    """First-jump orders for every (class, node) pair.

    ``orders[c, p-1]`` is the structurally predicted first jump order of
    class c at node p, or 0 when the class never shows up there within
    the order budget.  Exactly one order per pair by construction.
    """

    classes: tuple[EdgeClass, ...]
    n: int
    max_order: int
    orders: np.ndarray  # (len(classes), n) int16

    def order(self, cls: EdgeClass | int, p: int) -> int:
        c = cls if isinstance(cls, int) else self.classes.index(cls)
        return int(self.orders[c, p - 1])


def build_relation_index(g: Digraph, max_order: int | None = None,
                         distances: DistanceTable | None = None) -> RelationIndex:
    if max_order is None:
        max_order = default_max_order(g)
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    if distances is None:
        distances = g.distances
    classes = edge_classes(g)
    orders = np.zeros((len(classes), g.n), dtype=np.int16)
    hops = distances.hops
    for c, cls in enumerate(classes):
        d_tail = hops[cls.tail - 1, :]
        d_head = hops[cls.head - 1, :]
        orders[c, :] = _clause_orders(d_tail, d_head, max_order)
        if cls.bidirectional:
            # either orientation of the pair may supply the pattern; the
            # two clauses cannot both fire for the same node
            orders[c, :] += _clause_orders(d_head, d_tail, max_order)
    return RelationIndex(classes, g.n, int(max_order), orders)


def _clause_orders(d_tail: np.ndarray, d_head: np.ndarray,
                   max_order: int) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        hit = (np.isfinite(d_tail) & np.isfinite(d_head)
               & (d_head + 1.0 == d_tail)
               & (d_tail >= 1.0) & (d_tail <= max_order))
    out = np.zeros(d_tail.shape[0], dtype=np.int16)
    out[hit] = d_tail[hit].astype(np.int16)
    return out


def _column_indices(idx: RelationIndex, sensors: Iterable[int]) -> np.ndarray:
    cols = []
    for p in sensors:
        p = int(p)
        if not (1 <= p <= idx.n):
            raise ValueError(f"sensor {p} outside 1..{idx.n}")
        cols.append(p - 1)
    return np.array(cols, dtype=np.intp)


def count_undetected(idx: RelationIndex, sensors: Iterable[int]) -> int:
    """Number of classes invisible to every given sensor (order 0 across)."""
    cols = _column_indices(idx, sensors)
    if len(idx.classes) == 0:
        return 0
    if cols.size == 0:
        return len(idx.classes)
    visible = (idx.orders[:, cols] > 0).any(axis=1)
    return int((~visible).sum())


def class_signature(idx: RelationIndex, sensors: Iterable[int],
                    cls: EdgeClass | int) -> dict[int, int]:
    """Fingerprint of one class over the sensor set: sensor -> order."""
    c = cls if isinstance(cls, int) else idx.classes.index(cls)
    return {int(p): int(idx.orders[c, p - 1]) for p in sensors}


def count_unresolved(idx: RelationIndex, sensors: Iterable[int]) -> int:
    """Number of classes sharing their fingerprint with some other class.

    Comparing class against class is equivalent to the edge-level
    statement (some edge outside the class produces the same orders),
    because an edge's fingerprint is its class's fingerprint and classes
    partition the edges.
    """
    n_classes = len(idx.classes)
    if n_classes == 0:
        return 0
    cols = _column_indices(idx, sensors)
    if cols.size == 0:
        return n_classes if n_classes >= 2 else 0
    sub = idx.orders[:, cols]
    _, inverse, counts = np.unique(sub, axis=0, return_inverse=True,
                                   return_counts=True)
    return int((counts[inverse] >= 2).sum())


def relation_index_to_csv(idx: RelationIndex, path: str) -> None:
    """Emit the index: class id, representative edge, and per-node orders."""
    header = ["class_id", "tail", "head", "bidirectional"]
    header += [f"k{p}" for p in range(1, idx.n + 1)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {RELATIONS_SCHEMA_TAG}\n")
        fh.write(",".join(header) + "\n")
        for c, cls in enumerate(idx.classes):
            cells = [str(c), str(cls.tail), str(cls.head),
                     "1" if cls.bidirectional else "0"]
            cells += [str(int(v)) for v in idx.orders[c]]
            fh.write(",".join(cells) + "\n")
