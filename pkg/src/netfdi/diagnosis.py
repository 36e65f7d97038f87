"""Matching observed derivative jumps against the class fingerprints.

The observed signature is, per sensor, the first derivative order whose
jump magnitude crosses a threshold (0 when none does).  A class is a
candidate when the observation equals its fingerprint row exactly: a
nonzero entry k predicts the first jump at order k, and a zero entry
predicts silence through the order budget.

The zero-entry prediction is the structural theory's reading, and real
trajectories can violate it: the distance rules characterize jumps only
up to the first related order, and a sensor with no relation to the
failed class may still pick up a jump at some higher derivative once
the perturbation has propagated across the graph.  Such an observation
fits no fingerprint and deliberately surfaces as an inconsistent
observation (model mismatch) instead of silently matching; ``monitor``
records it as a documented miss.  Keeping the matcher exact is what
makes an isolation-complete sensor set (all fingerprint rows distinct)
actually isolate: any looser rule lets classes whose rows differ only
in their zero entries shadow each other forever.

Verdicts:

* no_failure - all-zero signature (flagged ambiguous when silent
  classes exist that would also produce it);
* isolated   - exactly one fingerprint equals the observation;
* detected   - several classes share the observed fingerprint;
* a nonzero signature matching no class raises
  ``InconsistentObservationError`` (model mismatch or multiple
  simultaneous failures).

``monitor`` wires the pieces together for a simulated run.  Genericity
failures (the state at t_f not exciting the perturbation) are an
accepted miss mode: logged, never raised.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .failures import check_perturbation_excitation
from .jumps import JUMP_TOL_SIMULATED, JumpTable, Trajectory, simulated_jump_table
from .relations import EdgeClass, RelationIndex


class InconsistentObservationError(ValueError):
    """A nonzero signature matched no class."""


@dataclass(frozen=True)
class ObservedSignature:
    """Per-sensor first jump orders read off a jump table at one instant."""

    orders: tuple[tuple[int, int], ...]  # (sensor, order), sensor-sorted
    t_f: float

    @property
    def as_dict(self) -> dict[int, int]:
        return dict(self.orders)

    @property
    def all_zero(self) -> bool:
        return all(k == 0 for _, k in self.orders)


@dataclass(frozen=True)
class Diagnosis:
    verdict: str  # "no_failure" | "detected" | "isolated"
    candidates: tuple[EdgeClass, ...]
    signature: ObservedSignature
    ambiguous: bool = False

    def to_json_dict(self) -> dict:
        return {
            "t_f": self.signature.t_f,
            "verdict": self.verdict,
            "candidates": [
                {"tail": c.tail, "head": c.head, "bidirectional": c.bidirectional}
                for c in self.candidates
            ],
            "signature": {str(p): k for p, k in self.signature.orders},
        }


def extract_signature(table: JumpTable, sensors: Sequence[int],
                      max_order: int,
                      threshold: float) -> ObservedSignature:
    """First above-threshold order per sensor; 0 when nothing crosses."""
    if max_order > table.max_order:
        raise ValueError(
            f"table only covers orders up to {table.max_order}")
    orders = []
    for p in sorted(int(p) for p in sensors):
        row = table.values[table.sensors.index(p)]
        first = 0
        for k in range(1, max_order + 1):
            if abs(row[k]) > threshold:
                first = k
                break
        orders.append((p, first))
    return ObservedSignature(tuple(orders), table.t_f)


def match(idx: RelationIndex, signature: ObservedSignature) -> Diagnosis:
    """Find every class whose fingerprint equals the observation exactly.

    Exactness is load-bearing: rows that agree on their nonzero entries
    but differ on where they are silent belong to distinguishable
    classes, and any matcher that lets zero entries slide would report
    Detected for pairs an isolation-complete sensor set provably splits.
    The price is that a late jump on an unrelated sensor (which the
    fingerprints do not model) fits no row and is raised as model
    mismatch rather than absorbed.
    """
    sensors = [p for p, _ in signature.orders]
    for p in sensors:
        if not (1 <= p <= idx.n):
            raise ValueError(f"sensor {p} outside 1..{idx.n}")
    observed = np.array([k for _, k in signature.orders], dtype=np.int16)
    cols = np.array([p - 1 for p in sensors], dtype=np.intp)
    if cols.size:
        rows = idx.orders[:, cols]
        hits = np.nonzero((rows == observed).all(axis=1))[0]
    else:
        hits = np.arange(len(idx.classes))
    candidates = tuple(idx.classes[c] for c in hits)
    if signature.all_zero:
        if candidates:
            # silent classes exist; seeing nothing does not mean nothing broke
            return Diagnosis("no_failure", candidates, signature, ambiguous=True)
        return Diagnosis("no_failure", (), signature)
    if not candidates:
        raise InconsistentObservationError(
            f"signature {signature.as_dict} matches no class; model mismatch "
            f"or simultaneous failures")
    if len(candidates) == 1:
        return Diagnosis("isolated", candidates, signature)
    return Diagnosis("detected", candidates, signature)


@dataclass(frozen=True)
class MonitorReport:
    """Events plus the documented misses of one monitored run."""

    events: tuple[Diagnosis, ...]
    misses: tuple[str, ...] = ()


def monitor(traj: Trajectory, sensors: Sequence[int], idx: RelationIndex,
            a: np.ndarray, a_faulty: np.ndarray | None = None,
            b: np.ndarray | None = None, w=None,
            threshold: float = JUMP_TOL_SIMULATED,
            excitation_tol: float = 1e-9) -> MonitorReport:
    """End-to-end diagnosis of one simulated trajectory.

    The derivative reconstruction needs the dynamics matrix on each side
    of the switch, so the faulty matrix comes either from the trajectory
    bookkeeping or from the caller.  Emits at most one event.
    """
    if traj.t_f is None:
        return MonitorReport(())
    if a_faulty is None:
        if traj.applied is None:
            raise ValueError("need the faulty weight matrix to reconstruct "
                             "derivatives past t_f")
        a_faulty = traj.applied.weights
    a = np.asarray(a, dtype=np.float64)
    a_faulty = np.asarray(a_faulty, dtype=np.float64)

    changed = [int(r) + 1 for r in
               np.nonzero((a_faulty != a).any(axis=1))[0]]
    excitation = check_perturbation_excitation(
        a, a_faulty, traj.state_at_failure(), changed, excitation_tol)
    if changed and not excitation.holds and len(
            excitation.violations) == len(changed):
        return MonitorReport((), (
            f"perturbation not excited by the state at t_f = {traj.t_f:.6g}; "
            f"failure invisible (genericity miss)",))

    table = simulated_jump_table(traj, a, a_faulty, b, w, sensors,
                                 idx.max_order)
    signature = extract_signature(table, sensors, idx.max_order, threshold)
    if signature.all_zero:
        return MonitorReport((), (
            f"no jump crossed the threshold {threshold:g} at t_f = "
            f"{traj.t_f:.6g} (silent signature miss)",))
    try:
        diagnosis = match(idx, signature)
    except InconsistentObservationError as exc:
        return MonitorReport((), (f"inconsistent observation: {exc}",))
    return MonitorReport((diagnosis,))


def write_diagnosis_jsonl(events: Iterable[Diagnosis], fh: IO[str]) -> None:
    for event in events:
        fh.write(json.dumps(event.to_json_dict(), sort_keys=True) + "\n")
