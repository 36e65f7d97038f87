"""Batch experiments: parameter sweeps and the geometric showcase.

``run_sweep`` draws many seeded instances per swept parameter value,
runs placement on each, and collects one CSV row per instance (schema
``netfdi-sweep-v1``; the figure generator consumes exactly this file).
Aggregated mean/std per value ride along in the returned object.

``demo_geometric`` builds one 50-node, 200-link proximity network and
treats its links three ways: as severed pairs (bidirectional), as 400
independent directions on the same wiring, and as a random one-way
orientation.  The side-by-side report shows what directionality buys.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from typing import Sequence

from .graph import Digraph, default_max_order, diameter
from .placement import SensorSet, greedy_detection, greedy_isolation
from .randgraphs import (GenSpec, radius_for_edge_count, random_geometric,
                         random_orientation, strip_bidirectional)
from .relations import build_relation_index, count_unresolved

SWEEP_SCHEMA_TAG = "netfdi-sweep-v1"
SWEEP_COLUMNS = (
    "family", "param_name", "param_value", "instance", "seed", "n", "edges",
    "diameter", "z", "md_size", "mi_size", "fi_residual_mi",
    "fi_residual_all", "feasible",
)

FAMILIES = ("erdos_renyi", "geometric", "small_world")
VARIANTS = ("directed", "undirected", "oriented", "bidirectional")


@dataclass(frozen=True)
class SweepConfig:
    """One family, one swept parameter, everything else pinned.

    ``variant`` controls edge pairing: ``directed`` draws independent
    directions (erdos_renyi only), ``undirected``/``bidirectional`` mark
    every link as a pair, ``oriented`` keeps a fair-coin direction of
    each pair.  Instance i uses seed ``seed_base + i`` for every swept
    value, so values are compared on paired randomness.
    """

    family: str
    param: str
    values: tuple
    fixed: dict = field(default_factory=dict)
    variant: str = "directed"
    instances: int = 50
    seed_base: int = 0
    weight_rule: str = "unit"
    max_order: int | None = None  # None - diameter + 1 policy
    isolate: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.instances < 1:
            raise ValueError("need at least one instance")
        if not self.values:
            raise ValueError("need at least one swept value")

    @property
    def series(self) -> str:
        return f"{self.family}-{self.variant}"

    def to_json_dict(self) -> dict:
        return {
            "family": self.family, "param": self.param,
            "values": list(self.values), "fixed": dict(self.fixed),
            "variant": self.variant, "instances": self.instances,
            "seed_base": self.seed_base, "weight_rule": self.weight_rule,
            "max_order": self.max_order, "isolate": self.isolate,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SweepConfig":
        return cls(
            family=doc["family"], param=doc["param"],
            values=tuple(doc["values"]), fixed=dict(doc.get("fixed", {})),
            variant=doc.get("variant", "directed"),
            instances=int(doc.get("instances", 50)),
            seed_base=int(doc.get("seed_base", 0)),
            weight_rule=doc.get("weight_rule", "unit"),
            max_order=doc.get("max_order"),
            isolate=bool(doc.get("isolate", True)),
        )


def load_sweep_config(path: str) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return SweepConfig.from_json_dict(json.load(fh))


def _instance_graph(cfg: SweepConfig, value, seed: int) -> Digraph:
    params = dict(cfg.fixed)
    params[cfg.param] = value
    if cfg.family == "erdos_renyi":
        spec = GenSpec("erdos_renyi", n=int(params["n"]), seed=seed,
                       weight_rule=cfg.weight_rule, p=float(params["p"]),
                       directed=(cfg.variant == "directed"))
    elif cfg.family == "geometric":
        n = int(params["n"])
        if "radius" in params:
            radius = float(params["radius"])
        else:
            radius = radius_for_edge_count(n, int(params["edges"]),
                                           float(params.get("side", 1.0)), seed)
        spec = GenSpec("geometric", n=n, seed=seed,
                       weight_rule=cfg.weight_rule, radius=radius,
                       side=float(params.get("side", 1.0)))
    else:
        spec = GenSpec("small_world", n=int(params["n"]), seed=seed,
                       weight_rule=cfg.weight_rule, d=int(params["d"]),
                       rewire_p=float(params["rewire_p"]))
    g, _ = spec.generate()
    if cfg.variant == "oriented":
        g = random_orientation(g, seed=(seed, 1))
    return g


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: tuple[dict, ...]
    summary: tuple[dict, ...]  # per swept value: means and sample stds


def run_sweep(cfg: SweepConfig) -> SweepResult:
    rows = []
    for value in cfg.values:
        for i in range(cfg.instances):
            seed = cfg.seed_base + i
            g = _instance_graph(cfg, value, seed)
            rows.append(_measure_instance(cfg, g, value, i, seed))
    return SweepResult(cfg, tuple(rows), tuple(_summarize(rows)))


def _measure_instance(cfg: SweepConfig, g: Digraph, value, instance: int,
                      seed: int) -> dict:
    diam = diameter(g)
    max_order = cfg.max_order if cfg.max_order is not None else default_max_order(g)
    idx = build_relation_index(g, max_order)
    detection = greedy_detection(idx)
    detection_ok = isinstance(detection, SensorSet)
    md_size = len(detection.nodes) if detection_ok else 0
    fi_all = count_unresolved(idx, range(1, g.n + 1))
    mi_size = 0
    fi_mi = fi_all
    isolation_ok = True
    if cfg.isolate and detection_ok:
        isolation = greedy_isolation(idx, detection)
        if isinstance(isolation, SensorSet):
            mi_size = len(isolation.nodes)
            fi_mi = 0
        else:
            isolation_ok = False
            mi_size = 0  # published behavior: no set when infeasible
            fi_mi = isolation.residual_all_nodes
    feasible = detection_ok and (isolation_ok or not cfg.isolate)
    return {
        "family": cfg.series, "param_name": cfg.param, "param_value": value,
        "instance": instance, "seed": seed, "n": g.n, "edges": len(g.edges),
        "diameter": diam.value, "z": max_order, "md_size": md_size,
        "mi_size": mi_size, "fi_residual_mi": fi_mi,
        "fi_residual_all": fi_all, "feasible": int(feasible),
    }


def _summarize(rows: list[dict]) -> list[dict]:
    out = []
    values = []
    for row in rows:
        if row["param_value"] not in values:
            values.append(row["param_value"])
    for value in values:
        group = [r for r in rows if r["param_value"] == value]
        entry = {"param_value": value, "instances": len(group)}
        for key in ("md_size", "mi_size", "z", "diameter", "fi_residual_mi",
                    "fi_residual_all"):
            data = [r[key] for r in group]
            entry[f"{key}_mean"] = statistics.fmean(data)
            entry[f"{key}_std"] = (statistics.stdev(data)
                                   if len(data) > 1 else 0.0)
        out.append(entry)
    return out


def write_sweep_csv(result: SweepResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {SWEEP_SCHEMA_TAG}\n")
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in result.rows:
            fh.write(",".join(str(row[c]) for c in SWEEP_COLUMNS) + "\n")


def append_sweep_csv(results: Sequence[SweepResult], path: str) -> None:
    """Several sweeps in one file; the family column separates the series."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {SWEEP_SCHEMA_TAG}\n")
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for result in results:
            for row in result.rows:
                fh.write(",".join(str(row[c]) for c in SWEEP_COLUMNS) + "\n")


# --- the geometric showcase ---


@dataclass(frozen=True)
class TreatmentReport:
    name: str
    classes: int
    max_order: int
    detection_size: int
    isolation_size: int | None  # None when isolation is infeasible
    unresolved_with_sensors: int
    unresolved_all_nodes: int


@dataclass(frozen=True)
class GeometricDemo:
    n: int
    undirected_edges: int
    radius: float
    seed: int
    treatments: tuple[TreatmentReport, ...]

    def treatment(self, name: str) -> TreatmentReport:
        for t in self.treatments:
            if t.name == name:
                return t
        raise KeyError(name)

    def format_table(self) -> str:
        header = (f"geometric demo: n = {self.n}, "
                  f"{self.undirected_edges} links, seed {self.seed}")
        lines = [header, "-" * len(header)]
        lines.append(f"{'treatment':<22}{'classes':>8}{'z':>4}{'|Md|':>6}"
                     f"{'|Mi|':>6}{'left@Mi':>9}{'left@V':>8}")
        for t in self.treatments:
            mi = "-" if t.isolation_size is None else str(t.isolation_size)
            lines.append(
                f"{t.name:<22}{t.classes:>8}{t.max_order:>4}"
                f"{t.detection_size:>6}{mi:>6}"
                f"{t.unresolved_with_sensors:>9}{t.unresolved_all_nodes:>8}")
        return "\n".join(lines)


def _treat(name: str, g: Digraph) -> TreatmentReport:
    max_order = default_max_order(g)
    idx = build_relation_index(g, max_order)
    detection = greedy_detection(idx)
    if not isinstance(detection, SensorSet):  # pragma: no cover - structural
        raise RuntimeError("detection infeasible on a generated instance")
    isolation = greedy_isolation(idx, detection)
    if isinstance(isolation, SensorSet):
        iso_size = len(isolation.nodes)
        left = 0
    else:
        iso_size = None
        left = isolation.residual_all_nodes
    return TreatmentReport(
        name=name, classes=len(idx.classes), max_order=max_order,
        detection_size=len(detection.nodes), isolation_size=iso_size,
        unresolved_with_sensors=left,
        unresolved_all_nodes=count_unresolved(idx, range(1, g.n + 1)))


def demo_geometric(seed: int = 7, n: int = 50,
                   undirected_edges: int = 200) -> GeometricDemo:
    """Build the showcase instance and compare the three link treatments."""
    radius = radius_for_edge_count(n, undirected_edges, seed=seed)
    g_bidi, _ = random_geometric(n, radius, seed=seed)
    if len(g_bidi.edges) != 2 * undirected_edges:
        raise RuntimeError("radius tuning missed the target edge count")
    g_pairs = strip_bidirectional(g_bidi)
    g_oriented = random_orientation(g_bidi, seed=(seed, 1))
    treatments = (
        _treat("bidirectional", g_bidi),
        _treat("unidirectional-pairs", g_pairs),
        _treat("oriented", g_oriented),
    )
    return GeometricDemo(n, undirected_edges, radius, seed, treatments)
