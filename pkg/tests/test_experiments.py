"""Sweep plumbing and the geometric showcase."""

from __future__ import annotations

import json
import statistics

import pytest

from netfdi import (
    SWEEP_COLUMNS,
    SWEEP_SCHEMA_TAG,
    SweepConfig,
    append_sweep_csv,
    demo_geometric,
    load_sweep_config,
    run_sweep,
    write_sweep_csv,
)
from netfdi.experiments import _instance_graph

ER_TINY = SweepConfig("erdos_renyi", "p", (0.3, 0.5), fixed={"n": 6},
                      instances=3, seed_base=2)


def test_sweep_config_validation():
    with pytest.raises(ValueError, match="unknown family"):
        SweepConfig("lattice", "p", (0.1,))
    with pytest.raises(ValueError, match="unknown variant"):
        SweepConfig("erdos_renyi", "p", (0.1,), variant="mixed")
    with pytest.raises(ValueError, match="at least one instance"):
        SweepConfig("erdos_renyi", "p", (0.1,), instances=0)
    with pytest.raises(ValueError, match="at least one swept value"):
        SweepConfig("erdos_renyi", "p", ())


def test_sweep_config_json_round_trip(tmp_path):
    cfg = SweepConfig("small_world", "rewire_p", (0.1, 0.3),
                      fixed={"n": 12, "d": 4}, variant="bidirectional",
                      instances=5, seed_base=9, weight_rule="unit",
                      max_order=6, isolate=False)
    assert SweepConfig.from_json_dict(cfg.to_json_dict()) == cfg
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(cfg.to_json_dict()), encoding="utf-8")
    assert load_sweep_config(str(path)) == cfg


def test_run_sweep_emits_one_row_per_instance():
    result = run_sweep(ER_TINY)
    assert len(result.rows) == 6
    for row in result.rows:
        assert set(row) == set(SWEEP_COLUMNS)
        assert row["family"] == "erdos_renyi-directed"
        assert row["param_name"] == "p"
        assert row["n"] == 6
        assert row["feasible"] in (0, 1)
    # instance i reuses seed_base + i for every swept value
    for value in (0.3, 0.5):
        seeds = [r["seed"] for r in result.rows if r["param_value"] == value]
        assert seeds == [2, 3, 4]


def test_run_sweep_summary_matches_rows():
    result = run_sweep(ER_TINY)
    assert [e["param_value"] for e in result.summary] == [0.3, 0.5]
    for entry in result.summary:
        group = [r for r in result.rows
                 if r["param_value"] == entry["param_value"]]
        assert entry["instances"] == 3
        data = [r["md_size"] for r in group]
        assert entry["md_size_mean"] == pytest.approx(statistics.fmean(data))
        assert entry["md_size_std"] == pytest.approx(statistics.stdev(data))


def test_run_sweep_single_instance_has_zero_std():
    cfg = SweepConfig("erdos_renyi", "p", (0.4,), fixed={"n": 5}, instances=1)
    result = run_sweep(cfg)
    assert len(result.rows) == 1
    assert result.summary[0]["md_size_std"] == 0.0


def test_run_sweep_is_deterministic():
    assert run_sweep(ER_TINY).rows == run_sweep(ER_TINY).rows


def test_instance_graph_honors_the_variant():
    cfg_undirected = SweepConfig("erdos_renyi", "p", (0.6,), fixed={"n": 6},
                                 variant="undirected")
    g_pairs = _instance_graph(cfg_undirected, 0.6, seed=3)
    assert g_pairs.bidirectional == g_pairs.edges
    cfg_oriented = SweepConfig("erdos_renyi", "p", (0.6,), fixed={"n": 6},
                               variant="oriented")
    g_oriented = _instance_graph(cfg_oriented, 0.6, seed=3)
    assert g_oriented.bidirectional == frozenset()
    assert len(g_oriented.edges) == len(g_pairs.edges) // 2


def test_instance_graph_geometric_edge_budget():
    cfg = SweepConfig("geometric", "n", (10,), fixed={"edges": 14},
                      variant="bidirectional")
    g = _instance_graph(cfg, 10, seed=4)
    assert len(g.edges) == 2 * 14


def test_instance_graph_small_world_budget():
    cfg = SweepConfig("small_world", "d", (4,),
                      fixed={"n": 10, "rewire_p": 0.2},
                      variant="bidirectional")
    g = _instance_graph(cfg, 4, seed=0)
    assert len(g.edges) == 10 * 4


def test_write_sweep_csv_schema(tmp_path):
    result = run_sweep(ER_TINY)
    path = tmp_path / "rows.csv"
    write_sweep_csv(result, str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# {SWEEP_SCHEMA_TAG}"
    assert lines[1] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 2 + 6
    for line in lines[2:]:
        assert len(line.split(",")) == len(SWEEP_COLUMNS)


def test_append_sweep_csv_merges_series(tmp_path):
    directed = run_sweep(ER_TINY)
    undirected = run_sweep(
        SweepConfig("erdos_renyi", "p", (0.3,), fixed={"n": 6},
                    variant="undirected", instances=2))
    path = tmp_path / "merged.csv"
    append_sweep_csv((directed, undirected), str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2 + 6 + 2
    families = {line.split(",")[0] for line in lines[2:]}
    assert families == {"erdos_renyi-directed", "erdos_renyi-undirected"}


def test_sweep_without_isolation_keeps_residuals():
    cfg = SweepConfig("erdos_renyi", "p", (0.4,), fixed={"n": 6},
                      instances=4, isolate=False)
    for row in run_sweep(cfg).rows:
        assert row["mi_size"] == 0
        assert row["fi_residual_mi"] == row["fi_residual_all"]


def test_demo_geometric_compares_three_treatments():
    demo = demo_geometric(seed=3, n=16, undirected_edges=30)
    assert demo.undirected_edges == 30
    assert demo.radius > 0
    names = [t.name for t in demo.treatments]
    assert names == ["bidirectional", "unidirectional-pairs", "oriented"]
    bidi = demo.treatment("bidirectional")
    pairs = demo.treatment("unidirectional-pairs")
    oriented = demo.treatment("oriented")
    assert bidi.classes == 30
    assert pairs.classes == 60  # same wiring, orientations unpaired
    assert oriented.classes == 30
    # identical wiring means identical distances, so the same budget
    assert bidi.max_order == pairs.max_order
    with pytest.raises(KeyError):
        demo.treatment("nope")


def test_demo_table_is_printable():
    demo = demo_geometric(seed=3, n=16, undirected_edges=30)
    table = demo.format_table()
    assert "geometric demo: n = 16, 30 links, seed 3" in table
    for name in ("bidirectional", "unidirectional-pairs", "oriented"):
        assert name in table
