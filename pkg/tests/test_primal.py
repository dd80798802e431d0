import math

import numpy as np
import pytest

from freebound.errors import DomainError
from freebound.primal import PrimalSolver

NONH_TERMINAL_ROOT = 1.6528916502810695  # 1 / sqrt((sqrt(3) - 1) / 2)
TERMINAL_VALUE = 1.414213562373095  # payoff at wealth 1.5 above floor 1


class TestImpliedDual:
    def test_terminal_power(self, solver_power):
        y = solver_power.implied_dual(1.0, 1.5)
        assert abs(y - math.sqrt(2.0)) < 1e-9

    def test_terminal_non_hara(self, solver_non_hara):
        y = solver_non_hara.implied_dual(1.0, 1.5)
        assert abs(y - NONH_TERMINAL_ROOT) < 1e-9

    def test_floor_rejected(self, solver_power):
        with pytest.raises(DomainError):
            solver_power.implied_dual(0.0, 1.0)  # x == K

    def test_near_floor_divergence(self, solver_power):
        y = solver_power.implied_dual(1.0, 1.0 + 1e-12)
        assert y > 1e5  # terminal closed form (x - K)^(-1/2)

    def test_warm_start(self, solver_power):
        cold = solver_power.implied_dual(0.0, 1.45)
        warm = solver_power.implied_dual(0.0, 1.45, y_init=cold * 1.01)
        assert abs(cold - warm) <= 1e-9 * cold


class TestValue:
    def test_terminal_is_payoff_both_branches(self, solver_power, solver_non_hara):
        # wealth 1.5 sits above the terminal boundary for the power family
        # (stopped branch) and below it for the two-term family (dual branch);
        # both must return the terminal payoff exactly
        sp = solver_power.solve(1.0, 1.5)
        assert sp.stopped
        assert abs(sp.value - TERMINAL_VALUE) < 1e-9
        sn = solver_non_hara.solve(1.0, 1.5)
        assert not sn.stopped
        assert abs(sn.value - 1.5052613226580834) < 1e-9

    def test_reference_values(self, solver_power, solver_non_hara):
        assert abs(solver_power.value(0.0, 1.5) - 1.4128) < 5e-3
        assert abs(solver_non_hara.value(0.0, 1.5) - 1.5094) < 5e-3

    def test_stopped_region(self, solver_power, boundary_power):
        x = boundary_power.primal_boundary(0.3) + 0.05
        sol = solver_power.solve(0.3, x)
        assert sol.stopped
        assert sol.strategy == 0.0
        assert abs(sol.value - solver_power.utility.primal_utility(x - 1.0)) < 1e-12

    def test_dominates_payoff(self, solver_power, power):
        for x in (1.1, 1.3, 1.45):
            v = solver_power.value(0.0, x)
            assert v >= power.primal_utility(x - 1.0) - 2e-3

    def test_monotone_concave_in_wealth(self, solver_power):
        xs = np.linspace(1.05, 1.5, 12)
        vals = np.array([solver_power.value(0.0, float(x)) for x in xs])
        assert np.all(np.diff(vals) > 0)
        assert np.all(np.diff(vals, 2) <= 1e-9)

    def test_envelope_slope(self, solver_power):
        # the wealth derivative of the value recovers the dual root
        t, x, h = 0.0, 1.45, 1e-4
        sol = solver_power.solve(t, x)
        fd = (solver_power.value(t, x + h) - solver_power.value(t, x - h)) / (2 * h)
        assert abs(fd - sol.y_star) <= 1e-4 * sol.y_star

    def test_legendre_minimality(self, solver_power, evaluator_power):
        t, x = 0.0, 1.45
        sol = solver_power.solve(t, x)
        at_root = evaluator_power.value(t, sol.y_star) + x * sol.y_star
        for y in (0.5 * sol.y_star, 2.0 * sol.y_star):
            assert at_root <= evaluator_power.value(t, y) + x * y + 1e-12


class TestStrategy:
    def test_positive_in_continuation(self, solver_power, solver_non_hara):
        assert solver_power.strategy(0.0, 1.45) > 0
        assert solver_non_hara.strategy(0.0, 1.5) > 0

    def test_zero_when_stopped(self, solver_power, boundary_power):
        x = boundary_power.primal_boundary(0.0) + 0.01
        assert solver_power.strategy(0.0, x) == 0.0

    def test_consistent_with_primal_curvature(self, solver_power):
        # feedback form equals -(theta/sigma) V_x / V_xx within tolerance
        t, x, h = 0.0, 1.45, 2e-3
        sol = solver_power.solve(t, x)
        vm, v0, vp = (solver_power.value(t, x + k) for k in (-h, 0.0, h))
        v_x = (vp - vm) / (2 * h)
        v_xx = (vp - 2 * v0 + vm) / h**2
        d = solver_power.boundary.derived
        alternative = -d.theta / solver_power.params.sigma * v_x / v_xx
        assert abs(sol.strategy - alternative) <= 5e-3 * abs(alternative)


class TestSimulation:
    def test_requires_continuation_start(self, solver_power, boundary_power):
        with pytest.raises(DomainError):
            solver_power.simulate(boundary_power.primal_boundary(0.0) + 0.1, 1, 50, 0)

    def test_step_count_guard(self, solver_power):
        with pytest.raises(ValueError):
            solver_power.simulate(1.4, 1, 5, 0)

    def test_reproducible(self, solver_power):
        a = solver_power.simulate(1.4, 2, 40, seed=42)
        b = solver_power.simulate(1.4, 2, 40, seed=42)
        for ra, rb in zip(a, b):
            assert np.array_equal(ra.wealth, rb.wealth)
            assert np.array_equal(ra.strategy, rb.strategy)

    def test_drift_without_noise(self, solver_power, params):
        times = np.linspace(0.0, params.T, 41)
        rec = solver_power._simulate_one(times, 1.35, np.zeros(40), seed=0)
        dt = times[1] - times[0]
        for i in range(40):
            if rec.strategy[i] > 0:
                assert rec.wealth[i + 1] >= rec.wealth[i] * (1.0 + params.r * dt) - 1e-12

    def test_stop_freeze(self, solver_power, params):
        # a strong upward push must hit the falling boundary before maturity
        times = np.linspace(0.0, params.T, 61)
        rec = solver_power._simulate_one(times, 1.45, np.full(60, 2.5), seed=0)
        assert rec.stop_time < params.T
        hit = int(np.searchsorted(times, rec.stop_time))
        growth = math.exp(params.r * (times[1] - times[0]))
        for i in range(hit, 60):
            assert rec.strategy[i] == 0.0
            assert rec.wealth[i + 1] == rec.wealth[i] * growth

    def test_structure(self, solver_power, params):
        records = solver_power.simulate(1.4, 2, 40, seed=42)
        assert len(records) == 2
        for rec in records:
            assert rec.times.shape == (41,)
            assert rec.wealth[0] == 1.4
            assert rec.seed == 42
            after = rec.times > rec.stop_time
            assert np.all(rec.strategy[after] == 0.0)
