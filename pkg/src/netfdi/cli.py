"""Command line front end.

Subcommands: place, simulate, diagnose, sweep, demo-geometric, and gen
(a convenience emitter of random instances in the edge-list format).
Exit codes: 0 success, 2 malformed input, 3 infeasibility.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .diagnosis import monitor, write_diagnosis_jsonl
from .experiments import (demo_geometric, load_sweep_config, run_sweep,
                          write_sweep_csv)
from .failures import apply_failure, load_scenario
from .graph import (GraphFileError, default_max_order, load_edge_list,
                    save_edge_list)
from .jumps import (JUMP_TOL_SIMULATED, SinusoidSignal, load_trajectory_csv,
                    simulate)
from .placement import (SensorSet, greedy_detection, greedy_isolation,
                        placement_json_dict)
from .randgraphs import GenSpec
from .relations import build_relation_index

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


class InfeasibleExit(RuntimeError):
    pass


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        print(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _cmd_place(args) -> None:
    g, _ = load_edge_list(args.graph)
    max_order = args.z if args.z is not None else default_max_order(g)
    idx = build_relation_index(g, max_order)
    detection = greedy_detection(idx)
    doc = placement_json_dict(detection, max_order, len(g.failure_targets))
    if args.isolate:
        if isinstance(detection, SensorSet):
            isolation = greedy_isolation(idx, detection)
            if isinstance(isolation, SensorSet):
                doc["isolation"] = {
                    "sensors": list(isolation.nodes),
                    "residuals": list(isolation.residuals),
                    "feasible": True,
                }
            else:
                doc["isolation"] = {
                    "sensors": [],
                    "residual_all_nodes": isolation.residual_all_nodes,
                    "feasible": False,
                }
        else:
            doc["isolation"] = {"sensors": [], "feasible": False}
    _write_or_print(json.dumps(doc, indent=2), args.out)
    if not doc["feasible"]:
        raise InfeasibleExit("detection infeasible")
    if args.isolate and not doc["isolation"]["feasible"]:
        raise InfeasibleExit("isolation infeasible")


def _parse_x0(args, n: int) -> np.ndarray:
    if args.x0 is not None:
        values = [float(v) for v in args.x0.split(",")]
        if len(values) != n:
            raise ValueError(f"x0 needs {n} entries, got {len(values)}")
        return np.array(values)
    rng = np.random.default_rng(args.seed)
    return rng.uniform(-1.0, 1.0, size=n)


def _parse_input(args, n: int):
    if args.input == "none":
        return None, None
    if args.input.startswith("sin:"):
        amp, omega, phase = (float(v) for v in args.input[4:].split(","))
        return np.ones((n, 1)), SinusoidSignal([amp], [omega], [phase])
    raise ValueError(f"unknown input spec {args.input!r} (none or sin:a,w,p)")


def _cmd_simulate(args) -> None:
    g, a = load_edge_list(args.graph)
    scenario = load_scenario(args.scenario) if args.scenario else None
    x0 = _parse_x0(args, g.n)
    b, w = _parse_input(args, g.n)
    traj = simulate(g, a, b, w, x0, args.t0, scenario, args.t_end, args.step)
    if args.out:
        traj.to_csv(args.out)
    else:
        print(f"simulated {traj.times.shape[0]} samples"
              + (f", failure at t = {traj.t_f}" if traj.t_f is not None else ""))


def _cmd_diagnose(args) -> None:
    g, a = load_edge_list(args.graph)
    with open(args.sensors, "r", encoding="utf-8") as fh:
        sensors = json.load(fh)["sensors"]
    if not sensors:
        raise ValueError("sensor file lists no sensors")
    scenario = load_scenario(args.scenario)
    traj = load_trajectory_csv(args.trajectory)
    max_order = args.z if args.z is not None else default_max_order(g)
    idx = build_relation_index(g, max_order)
    a_faulty = apply_failure(g, a, scenario).weights
    report = monitor(traj, sensors, idx, a, a_faulty,
                     threshold=args.threshold)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_diagnosis_jsonl(report.events, fh)
    else:
        write_diagnosis_jsonl(report.events, sys.stdout)
    for miss in report.misses:
        print(f"miss: {miss}", file=sys.stderr)


def _cmd_sweep(args) -> None:
    cfg = load_sweep_config(args.config)
    result = run_sweep(cfg)
    if args.out:
        write_sweep_csv(result, args.out)
    for entry in result.summary:
        print(f"{cfg.param} = {entry['param_value']}: "
              f"|Md| = {entry['md_size_mean']:.2f} +- {entry['md_size_std']:.2f}, "
              f"z = {entry['z_mean']:.2f}, diameter = {entry['diameter_mean']:.2f}")


def _cmd_demo_geometric(args) -> None:
    report = demo_geometric(seed=args.seed)
    text = report.format_table()
    _write_or_print(text, args.out)


def _cmd_gen(args) -> None:
    common = dict(n=args.n, seed=args.seed, weight_rule=args.weights)
    if args.family == "er":
        spec = GenSpec("erdos_renyi", p=args.p, directed=not args.undirected,
                       **common)
    elif args.family == "geometric":
        spec = GenSpec("geometric", radius=args.radius, **common)
    else:
        spec = GenSpec("small_world", d=args.d, rewire_p=args.rewire_p,
                       **common)
    g, a = spec.generate()
    save_edge_list(args.out, g, a)
    print(f"wrote {args.out}: n = {g.n}, {len(g.edges)} directed edges")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netfdi",
        description="Link-failure fingerprinting, sensor placement, and "
                    "diagnosis for networked single integrators")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("place", help="pick sensors for a graph file")
    p.add_argument("graph")
    p.add_argument("--z", type=int, default=None,
                   help="derivative order budget (default: diameter + 1)")
    p.add_argument("--isolate", action="store_true",
                   help="also grow an isolation set")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_place)

    p = sub.add_parser("simulate", help="integrate a failure scenario")
    p.add_argument("graph")
    p.add_argument("--scenario", default=None, help="failure scenario JSON")
    p.add_argument("--x0", default=None, help="comma-separated initial state")
    p.add_argument("--seed", type=int, default=0, help="seed for random x0")
    p.add_argument("--input", default="none", help="none or sin:amp,omega,phase")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out", default=None, help="trajectory CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("diagnose", help="match a trajectory against the index")
    p.add_argument("graph")
    p.add_argument("--sensors", required=True, help="placement JSON")
    p.add_argument("--trajectory", required=True, help="trajectory CSV")
    p.add_argument("--scenario", required=True,
                   help="scenario JSON (supplies the post-failure dynamics)")
    p.add_argument("--z", type=int, default=None)
    p.add_argument("--threshold", type=float, default=JUMP_TOL_SIMULATED)
    p.add_argument("--out", default=None, help="diagnosis JSON-lines path")
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("sweep", help="run a sweep config to a results CSV")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="results CSV path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("demo-geometric",
                       help="50-node proximity network, three link treatments")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_demo_geometric)

    p = sub.add_parser("gen", help="write a random instance as an edge list")
    p.add_argument("family", choices=("er", "geometric", "small-world"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.1, help="er edge probability")
    p.add_argument("--undirected", action="store_true",
                   help="er: marked bidirectional pairs instead of directions")
    p.add_argument("--radius", type=float, default=0.3, help="geometric radius")
    p.add_argument("--d", type=int, default=4, help="small-world ring degree")
    p.add_argument("--rewire-p", dest="rewire_p", type=float, default=0.2)
    p.add_argument("--weights", default="uniform",
                   choices=("unit", "uniform", "laplacian"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except InfeasibleExit as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GraphFileError, ValueError, OSError, KeyError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
