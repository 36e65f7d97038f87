"""Failure fingerprinting for networks of single integrators.

Predicts which derivative order of which node's output jumps when a
link fails, places a near-minimal sensor set so any single failure is
detected and, where possible, isolated, and diagnoses failures from
observed trajectories.
"""

from .diagnosis import (Diagnosis, InconsistentObservationError,
                        MonitorReport, ObservedSignature, extract_signature,
                        match, monitor, write_diagnosis_jsonl)
from .failures import (AppliedFailure, ExcitationReport, FailureScenario,
                       PerturbationRule, ROW_REBALANCE, ZERO_ONLY,
                       apply_failure, check_perturbation_excitation,
                       load_scenario, node_failure_edge_map, resolve_edges,
                       save_scenario)
from .graph import (Diameter, Digraph, DistanceTable, GenericityReport,
                    GraphFileError, MatrixPowerCache, ScaleGuardError,
                    all_pairs_distances, check_in_weighting,
                    check_shortest_walk_sums, default_max_order, diameter,
                    in_weighting, load_edge_list, save_edge_list,
                    walk_weight_sum, walk_weight_sum_enumerated)
from .jumps import (InputSignal, JumpOracle, JumpTable, PolynomialSignal,
                    SimulationDivergedError, SinusoidSignal, Trajectory,
                    UncharacterizedOrderError, ZeroSignal, exact_jump,
                    factored_jump, first_jump_order, jump_from_trajectory,
                    load_trajectory_csv, simulate, simulated_jump_table)
from .kernels import active_backend
from .placement import (ApproximationReport, DetectionInfeasible,
                        IsolationEmpty, SensorSet, approximation_report,
                        exhaustive_detection, exhaustive_isolation,
                        greedy_detection, greedy_isolation,
                        placement_json_dict)
from .randgraphs import (GenSpec, erdos_renyi, radius_for_edge_count,
                         random_geometric, random_orientation,
                         restrict_weights, strip_bidirectional,
                         watts_strogatz)
from .relations import (EdgeClass, RelationIndex, build_relation_index,
                        class_signature, count_undetected, count_unresolved,
                        edge_classes, relation_index_to_csv)
from .experiments import (SWEEP_COLUMNS, SWEEP_SCHEMA_TAG, GeometricDemo,
                          SweepConfig, SweepResult, TreatmentReport,
                          append_sweep_csv, demo_geometric, load_sweep_config,
                          run_sweep, write_sweep_csv)

__version__ = "0.1.0"

__all__ = [
    # graph model
    "Digraph", "DistanceTable", "Diameter", "MatrixPowerCache",
    "GenericityReport", "GraphFileError", "ScaleGuardError",
    "all_pairs_distances", "diameter", "default_max_order",
    "check_in_weighting", "in_weighting", "check_shortest_walk_sums",
    "walk_weight_sum", "walk_weight_sum_enumerated",
    "load_edge_list", "save_edge_list",
    # failure scenarios
    "FailureScenario", "PerturbationRule", "ZERO_ONLY", "ROW_REBALANCE",
    "AppliedFailure", "ExcitationReport", "apply_failure",
    "check_perturbation_excitation", "node_failure_edge_map", "resolve_edges",
    "load_scenario", "save_scenario",
    # jumps and simulation
    "JumpOracle", "JumpTable", "InputSignal", "ZeroSignal",
    "PolynomialSignal", "SinusoidSignal", "Trajectory",
    "UncharacterizedOrderError", "SimulationDivergedError",
    "exact_jump", "factored_jump", "first_jump_order", "simulate",
    "jump_from_trajectory", "simulated_jump_table", "load_trajectory_csv",
    # relations
    "EdgeClass", "RelationIndex", "edge_classes", "build_relation_index",
    "count_undetected", "count_unresolved", "class_signature",
    "relation_index_to_csv",
    # placement
    "SensorSet", "DetectionInfeasible", "IsolationEmpty",
    "greedy_detection", "greedy_isolation", "exhaustive_detection",
    "exhaustive_isolation", "ApproximationReport", "approximation_report",
    "placement_json_dict",
    # diagnosis
    "ObservedSignature", "Diagnosis", "MonitorReport",
    "InconsistentObservationError", "extract_signature", "match",
    "monitor", "write_diagnosis_jsonl",
    # generators and experiments
    "GenSpec", "erdos_renyi", "random_geometric", "radius_for_edge_count",
    "random_orientation", "strip_bidirectional", "restrict_weights",
    "watts_strogatz", "SweepConfig", "SweepResult", "GeometricDemo",
    "TreatmentReport", "run_sweep", "write_sweep_csv", "append_sweep_csv",
    "load_sweep_config", "demo_geometric", "SWEEP_COLUMNS", "SWEEP_SCHEMA_TAG",
    # runtime
    "active_backend", "__version__",
]
