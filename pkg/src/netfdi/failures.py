"""Link and node failure scenarios and their effect on the weight matrix.

A failure physically removes edges at time t_f.  Only the rows of the
head nodes of the removed edges may change, the removed entries must go
to zero, and the result has to be a valid in-weighting of the faulty
graph.  How the surviving entries of an affected row respond is the
perturbation rule:

* zero_only      - removed entries are zeroed, nothing else moves;
* row_rebalance  - removed weight is folded into the diagonal so the
                   row sum is preserved (consensus-style matrices keep
                   their zero row sums);
* explicit_row   - the caller supplies the new affected rows outright.

When no rule is given, row_rebalance is picked for matrices whose row
sums are all zero and zero_only otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .graph import Digraph, Edge, check_in_weighting

RULE_VARIANTS = ("zero_only", "row_rebalance", "explicit_row")
KINDS = ("unidirectional", "bidirectional", "node_incoming")

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class PerturbationRule:
    variant: str
    rows: Mapping[int, tuple[float, ...]] | None = None

    def __post_init__(self):
        if self.variant not in RULE_VARIANTS:
            raise ValueError(f"unknown rule variant {self.variant!r}")
        if (self.variant == "explicit_row") != (self.rows is not None):
            raise ValueError("explicit_row requires rows; other variants forbid them")

    @classmethod
    def explicit(cls, rows: Mapping[int, Iterable[float]]) -> "PerturbationRule":
        frozen = {int(i): tuple(float(v) for v in vals) for i, vals in rows.items()}
        return cls("explicit_row", frozen)


ZERO_ONLY = PerturbationRule("zero_only")
ROW_REBALANCE = PerturbationRule("row_rebalance")


@dataclass(frozen=True)
class FailureScenario:
    """What breaks and when.

    ``edges`` holds the removed directed edges; for node_incoming it is
    resolved against the graph when the failure is applied, so it may be
    empty until then.  ``rule=None`` means auto-select.
    """

    kind: str
    edges: tuple[Edge, ...]
    t_f: float
    rule: PerturbationRule | None = None
    node: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown failure kind {self.kind!r}")
        for tail, head in self.edges:
            if tail == head:
                raise ValueError("self-loops are not failure targets")
        if self.kind == "unidirectional" and len(self.edges) != 1:
            raise ValueError("unidirectional failure removes exactly one edge")
        if self.kind == "bidirectional":
            if len(self.edges) != 2 or self.edges[0] != self.edges[1][::-1]:
                raise ValueError(
                    "bidirectional failure removes a mutually reverse pair")
        if self.kind == "node_incoming" and self.node is None:
            raise ValueError("node_incoming failure needs a node")

    @classmethod
    def unidirectional(cls, tail: int, head: int, t_f: float,
                       rule: PerturbationRule | None = None) -> "FailureScenario":
        return cls("unidirectional", ((tail, head),), t_f, rule)

    @classmethod
    def bidirectional(cls, tail: int, head: int, t_f: float,
                      rule: PerturbationRule | None = None) -> "FailureScenario":
        return cls("bidirectional", ((tail, head), (head, tail)), t_f, rule)

    @classmethod
    def node_incoming(cls, node: int, t_f: float,
                      rule: PerturbationRule | None = None) -> "FailureScenario":
        return cls("node_incoming", (), t_f, rule, node=int(node))

    # JSON round-trip used by the CLI scenario files.

    def to_json_dict(self) -> dict:
        doc: dict = {
            "kind": self.kind,
            "edges": [list(e) for e in self.edges],
            "t_f": self.t_f,
            "rule": None,
        }
        if self.rule is not None:
            rule_doc: dict = {"variant": self.rule.variant}
            if self.rule.rows is not None:
                rule_doc["rows"] = {str(i): list(v) for i, v in self.rule.rows.items()}
            doc["rule"] = rule_doc
        if self.node is not None:
            doc["node"] = self.node
        return doc

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "FailureScenario":
        rule = None
        rule_doc = doc.get("rule")
        if rule_doc is not None:
            if rule_doc.get("variant") == "explicit_row":
                rule = PerturbationRule.explicit(
                    {int(i): v for i, v in rule_doc["rows"].items()})
            else:
                rule = PerturbationRule(rule_doc["variant"])
        edges = tuple((int(t), int(h)) for t, h in doc.get("edges", ()))
        node = doc.get("node")
        return cls(doc["kind"], edges, float(doc["t_f"]), rule,
                   node=None if node is None else int(node))


def load_scenario(path: str) -> FailureScenario:
    with open(path, "r", encoding="utf-8") as fh:
        return FailureScenario.from_json_dict(json.load(fh))


def save_scenario(path: str, scenario: FailureScenario) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario.to_json_dict(), fh, indent=2)
        fh.write("\n")


def node_failure_edge_map(g: Digraph, node: int) -> tuple[Edge, ...]:
    """Edges removed when a node stops receiving: its in-edges, minus any
    self-loop (the agent's own feedback is not a neighbor link)."""
    if not (1 <= node <= g.n):
        raise ValueError(f"node {node} outside 1..{g.n}")
    return tuple(e for e in g.in_edges(node) if e[0] != e[1])


def resolve_edges(g: Digraph, scenario: FailureScenario) -> tuple[Edge, ...]:
    if scenario.kind == "node_incoming":
        edges = node_failure_edge_map(g, scenario.node)  # type: ignore[arg-type]
        if not edges:
            raise ValueError(f"node {scenario.node} has no incoming links to lose")
        return edges
    for edge in scenario.edges:
        if edge not in g.edges:
            raise ValueError(f"failed edge {edge} is not in the graph")
    if scenario.kind == "bidirectional":
        for edge in scenario.edges:
            if edge not in g.bidirectional:
                raise ValueError(
                    f"bidirectional failure needs a marked pair; {edge} is not marked")
    return scenario.edges


def _auto_rule(a: np.ndarray) -> PerturbationRule:
    row_sums = np.abs(a.sum(axis=1))
    return ROW_REBALANCE if (row_sums <= ROW_SUM_TOL).all() else ZERO_ONLY


@dataclass(frozen=True)
class AppliedFailure:
    """Faulty graph, perturbed weights, and bookkeeping for diagnosis."""

    graph: Digraph
    weights: np.ndarray
    removed_edges: tuple[Edge, ...]
    affected_rows: tuple[int, ...]  # head nodes whose weight rows changed
    rule: PerturbationRule


def apply_failure(g: Digraph, a: np.ndarray,
                  scenario: FailureScenario) -> AppliedFailure:
    """Remove the scenario's edges and perturb the weight matrix.

    The output weight matrix is validated as an in-weighting of the
    faulty graph, so a rule that would park weight on an absent edge
    (for instance row_rebalance without a self-loop to absorb it) is an
    error rather than a silent contract break.
    """
    a = np.asarray(a, dtype=np.float64)
    removed = resolve_edges(g, scenario)
    removed_set = set(removed)
    new_edges = g.edges - removed_set
    new_bidi = set(g.bidirectional) - removed_set
    for tail, head in list(new_bidi):
        if (head, tail) not in new_bidi:
            # removing one orientation of a marked pair demotes the survivor
            new_bidi.discard((tail, head))
    faulty = Digraph(g.n, new_edges, new_bidi)

    rule = scenario.rule if scenario.rule is not None else _auto_rule(a)
    affected = tuple(sorted({head for _, head in removed}))
    a_faulty = a.copy()

    if rule.variant in ("zero_only", "row_rebalance"):
        for tail, head in removed:
            lost = a_faulty[head - 1, tail - 1]
            a_faulty[head - 1, tail - 1] = 0.0
            if rule.variant == "row_rebalance":
                a_faulty[head - 1, head - 1] += lost
    else:
        rows = rule.rows or {}
        if set(rows) != set(affected):
            raise ValueError(
                f"explicit rows {sorted(rows)} must cover exactly the affected "
                f"rows {list(affected)}")
        for head, values in rows.items():
            if len(values) != g.n:
                raise ValueError(f"row {head} must have {g.n} entries")
            a_faulty[head - 1, :] = values

    try:
        check_in_weighting(faulty, a_faulty)
    except ValueError as exc:
        raise ValueError(f"rule {rule.variant} broke the faulty sparsity: {exc}")
    return AppliedFailure(faulty, a_faulty, removed, affected, rule)


# --- excitation of the perturbation by the state ---


@dataclass(frozen=True)
class ExcitationReport:
    """Per affected row, the inner product of the weight change with x(t_f).

    A row whose product is numerically zero produces no derivative jump
    of any order at its characterized distance, so the failure is
    invisible there; callers treat that as a documented miss, not an
    error.
    """

    values: tuple[tuple[int, float], ...]  # (row head node, inner product)
    tol: float

    @property
    def violations(self) -> tuple[int, ...]:
        return tuple(row for row, val in self.values if abs(val) <= self.tol)

    @property
    def holds(self) -> bool:
        return not self.violations


def check_perturbation_excitation(a: np.ndarray, a_faulty: np.ndarray,
                                  x_tf: np.ndarray,
                                  rows: Iterable[int],
                                  tol: float = 1e-9) -> ExcitationReport:
    a = np.asarray(a, dtype=np.float64)
    a_faulty = np.asarray(a_faulty, dtype=np.float64)
    x = np.asarray(x_tf, dtype=np.float64)
    values = []
    for row in rows:
        delta = a_faulty[row - 1, :] - a[row - 1, :]
        values.append((int(row), float(delta @ x)))
    return ExcitationReport(tuple(values), tol)
