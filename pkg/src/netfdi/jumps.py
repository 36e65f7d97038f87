"""Derivative jumps caused by link failures, exactly and from simulation.

When edges fail at t_f the state stays continuous but its higher time
derivatives do not.  For output x_p the size of the order-k jump is

    jump(p, k) = e_p' (F^k - A^k) x(t_f)
               + e_p' (F^(k-1) - A^(k-1)) B w(t_f)
               + sum_{m=0..k-2} e_p' (F^m - A^m) B w^(k-m-1)(t_f)

with A the healthy and F the faulty weight matrix.  That closed form is
the ground truth here (``JumpOracle`` / ``exact_jump``); no finite
differencing anywhere.

The structural shortcut: for a single failed edge (j, i) the jump at
node p is zero for every order below dist(j, p), and at k = dist(j, p)
it factors into (sum of weight products over the length-(k-1) walks
i -> p) times (the weight-change row of i dotted with x(t_f)).  Orders
above dist(j, p) are genuinely uncharacterized by this route and asking
for them is an error, not a zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .failures import AppliedFailure, FailureScenario, apply_failure
from .graph import Digraph, DistanceTable, MatrixPowerCache

JUMP_TOL_EXACT = 1e-7  # nonzero threshold for closed-form jump tables
JUMP_TOL_SIMULATED = 1e-4  # threshold when jumps come from an RK4 trajectory


class UncharacterizedOrderError(ValueError):
    """The factored shortcut was asked beyond its validity range."""


class SimulationDivergedError(RuntimeError):
    pass


# --- input signals with exact derivatives ---


class ZeroSignal:
    """w(t) = 0; the no-input placeholder."""

    def __init__(self, m: int = 1):
        self.m = int(m)
        self.max_order = None

    def derivative(self, t: float, order: int) -> np.ndarray:
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        return np.zeros(self.m)


class PolynomialSignal:
    """Componentwise polynomials; coeffs[i, d] multiplies t**d in w_i."""

    def __init__(self, coeffs: np.ndarray, max_order: int | None = None):
        self.coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
        self.m = self.coeffs.shape[0]
        self.max_order = max_order

    def derivative(self, t: float, order: int) -> np.ndarray:
        _check_order(self, order)
        out = np.zeros(self.m)
        for d in range(order, self.coeffs.shape[1]):
            factor = math.perm(d, order)  # d! / (d - order)!
            out += self.coeffs[:, d] * factor * t ** (d - order)
        return out


class SinusoidSignal:
    """w_i(t) = amplitude_i * sin(omega_i t + phase_i)."""

    def __init__(self, amplitude, omega, phase=None, max_order: int | None = None):
        self.amplitude = np.atleast_1d(np.asarray(amplitude, dtype=np.float64))
        self.omega = np.atleast_1d(np.asarray(omega, dtype=np.float64))
        if phase is None:
            phase = np.zeros_like(self.amplitude)
        self.phase = np.atleast_1d(np.asarray(phase, dtype=np.float64))
        if not (self.amplitude.shape == self.omega.shape == self.phase.shape):
            raise ValueError("amplitude, omega, phase must share a shape")
        self.m = self.amplitude.shape[0]
        self.max_order = max_order

    def derivative(self, t: float, order: int) -> np.ndarray:
        _check_order(self, order)
        # each differentiation multiplies by omega and advances phase by pi/2
        return (self.amplitude * self.omega ** order
                * np.sin(self.omega * t + self.phase + order * np.pi / 2.0))


def _check_order(signal, order: int) -> None:
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    if signal.max_order is not None and order > signal.max_order:
        raise ValueError(
            f"signal only guarantees derivatives up to order {signal.max_order}, "
            f"order {order} requested")


@dataclass(frozen=True)
class InputSignal:
    """Injection matrix paired with a smooth signal (xdot = a x + b w)."""

    b: np.ndarray
    w: object  # any of the signal classes above

    @property
    def m(self) -> int:
        return self.b.shape[1]

    def __post_init__(self):
        if self.b.ndim != 2 or self.b.shape[1] != self.w.m:
            raise ValueError("injection matrix width must match the signal")


# --- exact jumps from matrix powers ---


class JumpOracle:
    """Exact derivative jumps of every order for one applied failure.

    Both matrix-power sequences grow through the same recursion, so
    orders below the structural first-jump distance come out as exact
    zeros rather than rounding dust.
    """

    def __init__(self, a: np.ndarray, a_faulty: np.ndarray, x_tf: np.ndarray,
                 t_f: float = 0.0, b: np.ndarray | None = None, w=None):
        self.a = np.asarray(a, dtype=np.float64)
        self.a_faulty = np.asarray(a_faulty, dtype=np.float64)
        self.x_tf = np.asarray(x_tf, dtype=np.float64)
        self.t_f = float(t_f)
        if (b is None) != (w is None):
            raise ValueError("provide both b and w, or neither")
        self.b = None if b is None else np.asarray(b, dtype=np.float64)
        self.w = w
        self._pre = MatrixPowerCache(self.a)
        self._post = MatrixPowerCache(self.a_faulty)

    def jump(self, p: int, k: int) -> float:
        if k < 0:
            raise ValueError("derivative order must be nonnegative")
        if k == 0:
            return 0.0  # the state itself is continuous
        row = p - 1
        diff_k = self._post.power(k)[row, :] - self._pre.power(k)[row, :]
        total = float(diff_k @ self.x_tf)
        if self.b is not None:
            diff = self._post.power(k - 1)[row, :] - self._pre.power(k - 1)[row, :]
            total += float(diff @ (self.b @ self.w.derivative(self.t_f, 0)))
            for m in range(0, k - 1):
                diff = self._post.power(m)[row, :] - self._pre.power(m)[row, :]
                total += float(
                    diff @ (self.b @ self.w.derivative(self.t_f, k - m - 1)))
        return total

    def first_nonzero_order(self, p: int, max_order: int,
                            threshold: float = JUMP_TOL_EXACT) -> int:
        for k in range(1, max_order + 1):
            if abs(self.jump(p, k)) > threshold:
                return k
        return 0

    def table(self, sensors: Sequence[int], max_order: int) -> "JumpTable":
        sensors = tuple(int(p) for p in sensors)
        values = np.zeros((len(sensors), max_order + 1))
        for row, p in enumerate(sensors):
            for k in range(1, max_order + 1):
                values[row, k] = self.jump(p, k)
        return JumpTable(sensors, max_order, values, self.t_f)


def exact_jump(a: np.ndarray, a_faulty: np.ndarray, b: np.ndarray | None,
               w, x_tf: np.ndarray, t_f: float, p: int, k: int) -> float:
    """One-shot wrapper around ``JumpOracle`` for a single (p, k) query."""
    return JumpOracle(a, a_faulty, x_tf, t_f, b, w).jump(p, k)


@dataclass(frozen=True)
class JumpTable:
    """Jump sizes per sensor and derivative order; column 0 is all zero."""

    sensors: tuple[int, ...]
    max_order: int
    values: np.ndarray  # (len(sensors), max_order + 1)
    t_f: float

    def jump(self, p: int, k: int) -> float:
        return float(self.values[self.sensors.index(p), k])

    def first_nonzero(self, p: int, threshold: float) -> int:
        row = self.values[self.sensors.index(p)]
        for k in range(1, self.max_order + 1):
            if abs(row[k]) > threshold:
                return k
        return 0


# --- the factored structural shortcut ---


def factored_jump(g: Digraph, a: np.ndarray, a_faulty: np.ndarray,
                  x_tf: np.ndarray, failed_edge: tuple[int, int],
                  p: int, k: int,
                  powers: MatrixPowerCache | None = None) -> float:
    """Jump size via the walk-sum factorization for one failed edge (j, i).

    Valid only for k <= dist(j, p): below that distance the jump is an
    exact structural zero, and at the distance itself it equals the
    length-(k-1) walk sum i -> p times the excitation of row i.  Orders
    beyond dist(j, p) raise ``UncharacterizedOrderError``.
    """
    if k < 1:
        raise ValueError("derivative order must be at least 1")
    a = np.asarray(a, dtype=np.float64)
    a_faulty = np.asarray(a_faulty, dtype=np.float64)
    x = np.asarray(x_tf, dtype=np.float64)
    tail, head = failed_edge
    changed_rows = np.nonzero((a_faulty != a).any(axis=1))[0] + 1
    if not all(row == head for row in changed_rows):
        raise ValueError(
            f"perturbation touches rows {list(changed_rows)}; the factored "
            f"form needs it confined to the head row {head}")
    d = g.distances.dist(tail, p)
    if k < d:
        return 0.0
    if k > d:
        raise UncharacterizedOrderError(
            f"order {k} exceeds dist({tail}, {p}) = {d}; the factored form "
            f"says nothing there")
    if powers is None:
        powers = MatrixPowerCache(a)
    walk_sum = float(powers.power(k - 1)[p - 1, head - 1])
    excitation = float((a_faulty[head - 1, :] - a[head - 1, :]) @ x)
    return walk_sum * excitation


def first_jump_order(g: Digraph, scenario: FailureScenario, p: int,
                     max_order: int,
                     distances: DistanceTable | None = None) -> int:
    """Structurally predicted first jump order at node p, 0 when none.

    For a single edge (j, i): order dist(j, p) exactly when the head
    sits one hop closer, dist(i, p) + 1 == dist(j, p) <= max_order.
    For a severed pair {i, j}: the larger endpoint distance, provided
    the two differ by exactly one and the larger is within budget.
    Equal endpoint distances yield 0 here even though such failures do
    produce a (later) jump; keeping that conservative gap visible is
    deliberate, see the relation-index docs.
    """
    if distances is None:
        distances = g.distances
    if scenario.kind == "unidirectional":
        (tail, head), = scenario.edges
        d_tail = distances.dist(tail, p)
        d_head = distances.dist(head, p)
        if math.isfinite(d_tail) and d_head + 1 == d_tail and d_tail <= max_order:
            return int(d_tail)
        return 0
    if scenario.kind == "bidirectional":
        (tail, head) = scenario.edges[0]
        d1 = distances.dist(tail, p)
        d2 = distances.dist(head, p)
        if math.isfinite(d1) and math.isfinite(d2) and abs(d1 - d2) == 1:
            k = int(max(d1, d2))
            if k <= max_order:
                return k
        return 0
    raise ValueError(
        "node failures have no single structural order; diagnose them "
        "through the relation classes of their removed in-edges")


# --- simulation ---


@dataclass(frozen=True)
class Trajectory:
    """Fixed-grid RK4 trajectory with the failure instant on the grid."""

    times: np.ndarray  # (T,)
    states: np.ndarray  # (T, n)
    t_f: float | None
    post_failure: np.ndarray  # (T,) bool, True from the failure sample on
    applied: AppliedFailure | None = None

    def state_at_failure(self) -> np.ndarray:
        if self.t_f is None:
            raise ValueError("trajectory has no failure")
        return self.states[int(np.argmax(self.post_failure))]

    def to_csv(self, path: str) -> None:
        n = self.states.shape[1]
        header = "t," + ",".join(f"x{i}" for i in range(1, n + 1)) + ",post_failure"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# netfdi-trajectory-v1\n")
            fh.write(header + "\n")
            for idx in range(self.times.shape[0]):
                cells = [repr(float(self.times[idx]))]
                cells += [repr(float(v)) for v in self.states[idx]]
                cells.append("1" if self.post_failure[idx] else "0")
                fh.write(",".join(cells) + "\n")


def load_trajectory_csv(path: str) -> Trajectory:
    times = []
    rows = []
    flags = []
    header: list[str] | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if header[0] != "t" or header[-1] != "post_failure":
                    raise ValueError(
                        f"unexpected trajectory columns {header[:3]}...")
                continue
            cells = line.split(",")
            times.append(float(cells[0]))
            rows.append([float(v) for v in cells[1:-1]])
            flags.append(cells[-1] == "1")
    if header is None or not rows:
        raise ValueError("empty trajectory file")
    post = np.array(flags, dtype=bool)
    t_f = float(np.array(times)[post][0]) if post.any() else None
    return Trajectory(np.array(times), np.array(rows), t_f, post)


def simulate(g: Digraph, a: np.ndarray, b: np.ndarray | None, w,
             x0: np.ndarray, t0: float, scenario: FailureScenario | None,
             t_end: float, step: float = 1e-3) -> Trajectory:
    """Integrate the network, switching matrices at the failure instant.

    The failure time is snapped onto the sample grid (never between two
    samples) and the state is carried across it unchanged; only the
    dynamics matrix switches.
    """
    a = np.asarray(a, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64)
    if step <= 0:
        raise ValueError("step must be positive")
    if t_end <= t0:
        raise ValueError("t_end must exceed t0")
    steps = int(round((t_end - t0) / step))
    if steps < 1:
        raise ValueError("horizon shorter than one step")

    times = t0 + step * np.arange(steps + 1)
    u_half = _forcing_half_grid(b, w, t0, step, steps, g.n)

    applied = None
    if scenario is None:
        states = kernels.rk4_linear(a, x0, u_half, step, steps)
        post = np.zeros(steps + 1, dtype=bool)
        t_f = None
    else:
        idx_f = int(round((scenario.t_f - t0) / step))
        if not (1 <= idx_f <= steps - 1):
            raise ValueError(
                f"failure time {scenario.t_f} does not snap strictly inside "
                f"({t0}, {t_end}) on the grid")
        t_f = float(times[idx_f])
        applied = apply_failure(g, a, scenario)
        pre = kernels.rk4_linear(a, x0, u_half[: 2 * idx_f + 1], step, idx_f)
        post_states = kernels.rk4_linear(
            applied.weights, pre[-1], u_half[2 * idx_f:], step, steps - idx_f)
        states = np.vstack([pre, post_states[1:]])
        post = times >= t_f
    if not np.isfinite(states).all():
        bad = int(np.argmax(~np.isfinite(states).all(axis=1)))
        raise SimulationDivergedError(
            f"state left the finite range near t = {times[bad]:.6g}")
    return Trajectory(times, states, t_f, post, applied)


def _forcing_half_grid(b: np.ndarray | None, w, t0: float, step: float,
                       steps: int, n: int) -> np.ndarray:
    if (b is None) != (w is None):
        raise ValueError("provide both b and w, or neither")
    grid = np.zeros((2 * steps + 1, n))
    if b is None:
        return grid
    b = np.asarray(b, dtype=np.float64)
    for j in range(2 * steps + 1):
        grid[j] = b @ w.derivative(t0 + 0.5 * step * j, 0)
    return grid


# --- derivative reconstruction from a trajectory sample ---


def output_derivative(powers: MatrixPowerCache, x: np.ndarray,
                      b: np.ndarray | None, w, t: float, p: int,
                      k: int) -> float:
    """k-th time derivative of x_p from the state sample and the dynamics.

    d^k x_p / dt^k = e_p' (M^k x + M^(k-1) B w(t)
                      + sum_{m=0..k-2} M^m B w^(k-m-1)(t))
    where M is whichever weight matrix governs the side of interest.
    """
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    row = p - 1
    total = float(powers.power(k)[row, :] @ x)
    if b is not None:
        if k >= 1:
            total += float(powers.power(k - 1)[row, :]
                           @ (b @ w.derivative(t, 0)))
        for m in range(0, k - 1):
            total += float(powers.power(m)[row, :]
                           @ (b @ w.derivative(t, k - m - 1)))
    return total


def jump_from_trajectory(traj: Trajectory, a: np.ndarray,
                         a_faulty: np.ndarray, b: np.ndarray | None, w,
                         p: int, k: int) -> float:
    """Order-k jump estimated from the simulated state at the failure sample.

    Evaluates the closed-form derivative on each side of t_f at the same
    sampled state, so it matches ``exact_jump`` up to the integration
    error in that sample.
    """
    if k < 1:
        raise ValueError("derivative order must be at least 1")
    x_hat = traj.state_at_failure()
    t_f = traj.t_f
    pre = MatrixPowerCache(np.asarray(a, dtype=np.float64))
    post = MatrixPowerCache(np.asarray(a_faulty, dtype=np.float64))
    left = output_derivative(pre, x_hat, b, w, t_f, p, k)
    right = output_derivative(post, x_hat, b, w, t_f, p, k)
    return right - left


def simulated_jump_table(traj: Trajectory, a: np.ndarray, a_faulty: np.ndarray,
                         b: np.ndarray | None, w, sensors: Sequence[int],
                         max_order: int) -> JumpTable:
    sensors = tuple(int(p) for p in sensors)
    x_hat = traj.state_at_failure()
    t_f = traj.t_f
    pre = MatrixPowerCache(np.asarray(a, dtype=np.float64))
    post = MatrixPowerCache(np.asarray(a_faulty, dtype=np.float64))
    values = np.zeros((len(sensors), max_order + 1))
    for row, p in enumerate(sensors):
        for k in range(1, max_order + 1):
            left = output_derivative(pre, x_hat, b, w, t_f, p, k)
            right = output_derivative(post, x_hat, b, w, t_f, p, k)
            values[row, k] = right - left
    return JumpTable(sensors, max_order, values, t_f)
