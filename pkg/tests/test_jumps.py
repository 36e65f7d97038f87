"""Exact jump oracle, factored shortcut, simulation, and reconstruction.

The oracle's closed form is re-implemented inline here with
``np.linalg.matrix_power`` so the two never share a code path; hand
cases are frozen as literals.
"""

from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from netfdi import (
    Digraph,
    FailureScenario,
    InputSignal,
    JumpOracle,
    PolynomialSignal,
    SimulationDivergedError,
    SinusoidSignal,
    UncharacterizedOrderError,
    ZeroSignal,
    apply_failure,
    exact_jump,
    factored_jump,
    first_jump_order,
    jump_from_trajectory,
    load_trajectory_csv,
    simulate,
    simulated_jump_table,
)

from conftest import generic_state, positive_weights, random_digraph

P3 = Digraph(3, [(1, 2), (2, 3)])
P4 = Digraph(4, [(1, 2), (2, 3), (3, 4)])
C5 = Digraph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])


def unit_weights(g: Digraph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for tail, head in g.edges:
        a[head - 1, tail - 1] = 1.0
    return a


def reference_jump(a, f, b, w, x_tf, t_f, p, k):
    """Closed form evaluated with numpy's own matrix powers."""
    def pw(m, i):
        return np.linalg.matrix_power(m, i)[p - 1, :]

    total = (pw(f, k) - pw(a, k)) @ x_tf
    if b is not None:
        total += (pw(f, k - 1) - pw(a, k - 1)) @ (b @ w.derivative(t_f, 0))
        for m in range(0, k - 2 + 1):
            total += (pw(f, m) - pw(a, m)) @ (b @ w.derivative(t_f, k - m - 1))
    return float(total)


class TestSignals:
    def test_zero_signal(self):
        w = ZeroSignal(2)
        assert np.array_equal(w.derivative(3.0, 5), [0.0, 0.0])
        with pytest.raises(ValueError):
            w.derivative(0.0, -1)

    def test_polynomial_derivatives(self):
        # w(t) = 1 + 2 t + 3 t^2
        w = PolynomialSignal([[1.0, 2.0, 3.0]])
        assert w.derivative(2.0, 0)[0] == 17.0
        assert w.derivative(2.0, 1)[0] == 14.0
        assert w.derivative(2.0, 2)[0] == 6.0
        assert w.derivative(2.0, 3)[0] == 0.0

    def test_polynomial_components(self):
        w = PolynomialSignal([[1.0, 0.0], [0.0, 4.0]])
        assert np.array_equal(w.derivative(0.5, 0), [1.0, 2.0])
        assert np.array_equal(w.derivative(0.5, 1), [0.0, 4.0])

    def test_polynomial_order_budget(self):
        w = PolynomialSignal([[1.0, 1.0]], max_order=2)
        w.derivative(0.0, 2)
        with pytest.raises(ValueError, match="order 3"):
            w.derivative(0.0, 3)

    def test_sinusoid_derivatives(self):
        w = SinusoidSignal([2.0], [3.0], [0.5])
        t = 0.7
        assert w.derivative(t, 0)[0] == pytest.approx(2.0 * np.sin(3.0 * t + 0.5))
        assert w.derivative(t, 1)[0] == pytest.approx(6.0 * np.cos(3.0 * t + 0.5))
        assert w.derivative(t, 4)[0] == pytest.approx(
            2.0 * 81.0 * np.sin(3.0 * t + 0.5))

    def test_sinusoid_shape_check(self):
        with pytest.raises(ValueError, match="share a shape"):
            SinusoidSignal([1.0, 2.0], [1.0])

    def test_input_signal_width_check(self):
        with pytest.raises(ValueError, match="width"):
            InputSignal(np.zeros((3, 2)), ZeroSignal(1))
        InputSignal(np.zeros((3, 2)), ZeroSignal(2))


class TestJumpOracle:
    def p3_setup(self):
        a = unit_weights(P3)
        applied = apply_failure(P3, a, FailureScenario.unidirectional(1, 2, 0.0))
        x = np.array([1.0, 0.0, 0.0])
        return a, applied.weights, x

    def test_path_values_frozen(self):
        a, f, x = self.p3_setup()
        oracle = JumpOracle(a, f, x)
        assert oracle.jump(3, 1) == 0.0
        assert oracle.jump(3, 2) == -1.0
        assert oracle.jump(2, 1) == -1.0
        assert oracle.jump(1, 1) == 0.0

    def test_order_zero_is_continuous(self):
        a, f, x = self.p3_setup()
        assert JumpOracle(a, f, x).jump(3, 0) == 0.0

    def test_argument_validation(self):
        a, f, x = self.p3_setup()
        with pytest.raises(ValueError):
            JumpOracle(a, f, x).jump(3, -1)
        with pytest.raises(ValueError, match="both b and w"):
            JumpOracle(a, f, x, b=np.zeros((3, 1)))

    def test_forced_two_node_frozen(self):
        # P2, fail the only edge at t_f = 0.5 with w(t) = 1 + t:
        # order 1 jump is -x1, order 2 jump is -w(t_f)
        g = Digraph(2, [(1, 2)])
        a = unit_weights(g)
        applied = apply_failure(g, a, FailureScenario.unidirectional(1, 2, 0.5))
        b = np.array([[1.0], [0.0]])
        w = PolynomialSignal([[1.0, 1.0]])
        x = np.array([2.0, -1.0])
        oracle = JumpOracle(a, applied.weights, x, t_f=0.5, b=b, w=w)
        assert oracle.jump(2, 1) == -2.0
        assert oracle.jump(2, 2) == -1.5
        assert oracle.jump(1, 1) == 0.0

    def test_matches_reference_form(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 8))
            g = random_digraph(rng, n, 0.35)
            a = positive_weights(g, rng)
            edge = sorted(g.failure_targets)[int(rng.integers(len(g.failure_targets)))]
            applied = apply_failure(
                g, a, FailureScenario.unidirectional(*edge, t_f=0.25))
            b = rng.uniform(-1.0, 1.0, size=(n, 2))
            w = SinusoidSignal(rng.uniform(0.5, 1.5, 2), rng.uniform(0.5, 2.0, 2))
            x = generic_state(rng, n)
            oracle = JumpOracle(a, applied.weights, x, t_f=0.25, b=b, w=w)
            for k in range(1, 6):
                p = int(rng.integers(1, n + 1))
                want = reference_jump(a, applied.weights, b, w, x, 0.25, p, k)
                assert oracle.jump(p, k) == pytest.approx(want, abs=1e-9)

    def test_exact_zero_below_distance(self, rng):
        # zero_only failures: everything below dist(tail, p) must be 0.0
        # bitwise, not merely small
        for _ in range(20):
            n = int(rng.integers(3, 9))
            g = random_digraph(rng, n, 0.3)
            a = positive_weights(g, rng)
            edge = sorted(g.failure_targets)[int(rng.integers(len(g.failure_targets)))]
            applied = apply_failure(g, a, FailureScenario.unidirectional(*edge, 0.0))
            oracle = JumpOracle(a, applied.weights, generic_state(rng, n))
            tail = edge[0]
            for p in range(1, n + 1):
                d = g.distances.dist(tail, p)
                top = int(min(d, n + 1)) if np.isfinite(d) else n + 1
                for k in range(1, top):
                    assert oracle.jump(p, k) == 0.0

    def test_first_nonzero_order(self):
        a, f, x = self.p3_setup()
        oracle = JumpOracle(a, f, x)
        assert oracle.first_nonzero_order(3, 4) == 2
        assert oracle.first_nonzero_order(2, 4) == 1
        assert oracle.first_nonzero_order(1, 4) == 0

    def test_exact_jump_wrapper(self):
        a, f, x = self.p3_setup()
        assert exact_jump(a, f, None, None, x, 0.0, 3, 2) == -1.0

    def test_table(self):
        a, f, x = self.p3_setup()
        oracle = JumpOracle(a, f, x)
        table = oracle.table([2, 3], max_order=3)
        assert table.sensors == (2, 3)
        assert table.values.shape == (2, 4)
        assert np.array_equal(table.values[:, 0], [0.0, 0.0])
        assert table.jump(3, 2) == -1.0
        assert table.first_nonzero(3, 1e-7) == 2
        assert table.first_nonzero(2, 1e-7) == 1


class TestFactoredJump:
    def test_path_case(self):
        a = unit_weights(P3)
        applied = apply_failure(P3, a, FailureScenario.unidirectional(1, 2, 0.0))
        x = np.array([1.0, 0.0, 0.0])
        assert factored_jump(P3, a, applied.weights, x, (1, 2), 3, 2) == -1.0
        assert factored_jump(P3, a, applied.weights, x, (1, 2), 3, 1) == 0.0
        with pytest.raises(UncharacterizedOrderError):
            factored_jump(P3, a, applied.weights, x, (1, 2), 3, 3)
        with pytest.raises(ValueError):
            factored_jump(P3, a, applied.weights, x, (1, 2), 3, 0)

    def test_requires_single_row_change(self):
        a = unit_weights(P3)
        f = a.copy()
        f[1, 0] = 0.0
        f[2, 1] = 0.5  # second changed row: not a single-edge pattern
        with pytest.raises(ValueError, match="confined"):
            factored_jump(P3, a, f, np.ones(3), (1, 2), 3, 2)

    def test_matches_oracle_at_distance(self, rng):
        hits = 0
        while hits < 30:
            n = int(rng.integers(3, 9))
            g = random_digraph(rng, n, 0.3)
            a = positive_weights(g, rng)
            edge = sorted(g.failure_targets)[int(rng.integers(len(g.failure_targets)))]
            applied = apply_failure(g, a, FailureScenario.unidirectional(*edge, 0.0))
            x = generic_state(rng, n)
            oracle = JumpOracle(a, applied.weights, x)
            for p in range(1, n + 1):
                d = g.distances.dist(edge[0], p)
                if not np.isfinite(d) or d < 1:
                    continue
                k = int(d)
                fast = factored_jump(g, a, applied.weights, x, edge, p, k)
                assert fast == pytest.approx(oracle.jump(p, k), abs=1e-9)
                hits += 1


class TestFirstJumpOrder:
    def test_unidirectional_frozen(self):
        assert first_jump_order(P4, FailureScenario.unidirectional(1, 2, 0.0),
                                4, max_order=3) == 3
        assert first_jump_order(C5, FailureScenario.unidirectional(1, 2, 0.0),
                                1, max_order=5) == 0

    def test_order_budget_cuts_off(self):
        scenario = FailureScenario.unidirectional(1, 2, 0.0)
        assert first_jump_order(P4, scenario, 4, max_order=2) == 0

    def test_unreachable_tail(self):
        scenario = FailureScenario.unidirectional(3, 4, 0.0)
        assert first_jump_order(P4, scenario, 1, max_order=4) == 0

    def test_bidirectional_frozen(self):
        edges = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]
        k3 = Digraph(3, edges, bidirectional=edges)
        assert first_jump_order(k3, FailureScenario.bidirectional(1, 2, 0.0),
                                1, max_order=3) == 1
        assert first_jump_order(k3, FailureScenario.bidirectional(2, 3, 0.0),
                                1, max_order=3) == 0  # equal endpoint distances

    def test_node_failures_rejected(self):
        with pytest.raises(ValueError, match="relation classes"):
            first_jump_order(P3, FailureScenario.node_incoming(2, 0.0), 3, 3)


class TestSimulate:
    def test_matches_matrix_exponential(self, rng):
        n = 4
        g = random_digraph(rng, n, 0.5, self_loop_p=1.0)
        a = positive_weights(g, rng) * np.where(np.eye(n), -2.0, 1.0)
        x0 = generic_state(rng, n)
        traj = simulate(g, a, None, None, x0, 0.0, None, 0.5)
        want = scipy.linalg.expm(a * 0.5) @ x0
        assert np.allclose(traj.states[-1], want, atol=1e-6)
        assert traj.t_f is None
        assert not traj.post_failure.any()

    def test_failure_switches_dynamics(self, rng):
        g = Digraph(2, [(1, 2), (2, 1)])
        a = np.array([[0.0, -0.8], [0.6, 0.0]])
        x0 = np.array([1.0, -0.5])
        scenario = FailureScenario.unidirectional(1, 2, 0.2)
        traj = simulate(g, a, None, None, x0, 0.0, scenario, 0.5)
        f = traj.applied.weights
        want = scipy.linalg.expm(f * 0.3) @ (scipy.linalg.expm(a * 0.2) @ x0)
        assert np.allclose(traj.states[-1], want, atol=1e-6)
        assert traj.t_f == pytest.approx(0.2)
        assert traj.post_failure.sum() == 301  # samples at t >= 0.2

    def test_failure_time_snaps_to_grid(self):
        g = Digraph(2, [(1, 2)])
        a = unit_weights(g)
        scenario = FailureScenario.unidirectional(1, 2, 0.1004)
        traj = simulate(g, a, None, None, np.ones(2), 0.0, scenario, 0.3)
        assert traj.t_f == pytest.approx(0.1)
        assert traj.state_at_failure() is not None

    def test_state_is_continuous_at_failure(self):
        g = Digraph(2, [(1, 2)])
        a = unit_weights(g)
        scenario = FailureScenario.unidirectional(1, 2, 0.1)
        traj = simulate(g, a, None, None, np.array([1.0, 1.0]), 0.0,
                        scenario, 0.3)
        idx = int(np.argmax(traj.post_failure))
        step = np.abs(np.diff(traj.states, axis=0)).max(axis=1)
        # the switch sample moves no more than neighbouring samples do
        assert step[idx - 1] <= 2.0 * max(step[idx - 2], step[idx])

    def test_forced_system(self):
        # dx/dt = -x + sin(t), closed form checked at the horizon
        g = Digraph(1, [(1, 1)])
        a = np.array([[-1.0]])
        b = np.array([[1.0]])
        w = SinusoidSignal([1.0], [1.0])
        traj = simulate(g, a, b, w, np.array([0.0]), 0.0, None, 1.0)
        t = 1.0
        want = 0.5 * (np.exp(-t) + np.sin(t) - np.cos(t))
        assert traj.states[-1, 0] == pytest.approx(want, abs=1e-8)

    def test_argument_validation(self):
        g = Digraph(2, [(1, 2)])
        a = unit_weights(g)
        with pytest.raises(ValueError, match="positive"):
            simulate(g, a, None, None, np.ones(2), 0.0, None, 1.0, step=0.0)
        with pytest.raises(ValueError, match="exceed"):
            simulate(g, a, None, None, np.ones(2), 1.0, None, 1.0)
        late = FailureScenario.unidirectional(1, 2, 0.9999)
        with pytest.raises(ValueError, match="snap strictly inside"):
            simulate(g, a, None, None, np.ones(2), 0.0, late, 1.0)

    def test_divergence_detected(self):
        g = Digraph(1, [(1, 1)])
        a = np.array([[100.0]])
        with pytest.raises(SimulationDivergedError):
            simulate(g, a, None, None, np.array([1.0]), 0.0, None, 10.0)


class TestTrajectoryFiles:
    def make_traj(self):
        g = Digraph(2, [(1, 2), (2, 1)])
        a = np.array([[0.0, -0.8], [0.6, 0.0]])
        scenario = FailureScenario.unidirectional(1, 2, 0.05)
        return simulate(g, a, None, None, np.array([1.0, -0.5]), 0.0,
                        scenario, 0.1)

    def test_csv_round_trip(self, tmp_path):
        traj = self.make_traj()
        path = str(tmp_path / "traj.csv")
        traj.to_csv(path)
        back = load_trajectory_csv(path)
        assert np.array_equal(back.times, traj.times)
        assert np.array_equal(back.states, traj.states)
        assert np.array_equal(back.post_failure, traj.post_failure)
        assert back.t_f == traj.t_f

    def test_no_failure_round_trip(self, tmp_path):
        g = Digraph(2, [(1, 2)])
        traj = simulate(g, unit_weights(g), None, None, np.ones(2), 0.0,
                        None, 0.05)
        path = str(tmp_path / "quiet.csv")
        traj.to_csv(path)
        back = load_trajectory_csv(path)
        assert back.t_f is None
        with pytest.raises(ValueError, match="no failure"):
            back.state_at_failure()

    def test_bad_files(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("# netfdi-trajectory-v1\n")
        with pytest.raises(ValueError, match="empty trajectory"):
            load_trajectory_csv(str(empty))
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="columns"):
            load_trajectory_csv(str(bad))


class TestTrajectoryJumps:
    def test_matches_oracle_at_sampled_state(self):
        a = unit_weights(P3)
        scenario = FailureScenario.unidirectional(1, 2, 0.05)
        traj = simulate(P3, a, None, None, np.array([1.0, 0.2, -0.3]), 0.0,
                        scenario, 0.1)
        f = traj.applied.weights
        x_hat = traj.state_at_failure()
        oracle = JumpOracle(a, f, x_hat, t_f=traj.t_f)
        for p in (2, 3):
            for k in (1, 2, 3):
                got = jump_from_trajectory(traj, a, f, None, None, p, k)
                assert got == pytest.approx(oracle.jump(p, k), abs=1e-12)

    def test_order_validation(self):
        traj = TestTrajectoryFiles().make_traj()
        f = traj.applied.weights
        with pytest.raises(ValueError):
            jump_from_trajectory(traj, f, f, None, None, 1, 0)

    def test_simulated_table(self):
        a = unit_weights(P3)
        scenario = FailureScenario.unidirectional(1, 2, 0.05)
        traj = simulate(P3, a, None, None, np.array([1.0, 0.2, -0.3]), 0.0,
                        scenario, 0.1)
        f = traj.applied.weights
        table = simulated_jump_table(traj, a, f, None, None, [2, 3], 3)
        assert table.sensors == (2, 3)
        for p in (2, 3):
            for k in (1, 2, 3):
                want = jump_from_trajectory(traj, a, f, None, None, p, k)
                assert table.jump(p, k) == want

    def test_forced_table_matches_exact_jump(self):
        # exact state at the switch sample: reconstruction equals closed form
        g = Digraph(2, [(1, 2)])
        a = unit_weights(g)
        b = np.array([[1.0], [0.0]])
        w = PolynomialSignal([[1.0, 1.0]])
        scenario = FailureScenario.unidirectional(1, 2, 0.05)
        traj = simulate(g, a, b, w, np.array([2.0, -1.0]), 0.0, scenario, 0.1)
        f = traj.applied.weights
        x_hat = traj.state_at_failure()
        oracle = JumpOracle(a, f, x_hat, t_f=traj.t_f, b=b, w=w)
        got = jump_from_trajectory(traj, a, f, b, w, 2, 2)
        assert got == pytest.approx(oracle.jump(2, 2), abs=1e-12)
