"""Primal value, optimal strategy, and wealth-path simulation via convex duality.

For wealth x in the continuation region the dual price solves
``dual_value_y(t, y) + x = 0``; the primal value is the dual value plus
``x * y`` and the optimal risky position is ``(theta / sigma) * y * V_yy``.
Wealth at or above the exercise boundary takes the payoff immediately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import GcaBoundary
from .dualvalue import DualValueEvaluator
from .errors import DomainError, ScanFailure
from .model import ModelParams
from .numerics import Bracket, find_root
from .utility import DualUtilityFamily

__all__ = ["PrimalSolution", "PathRecord", "PrimalSolver"]

_SCAN_LO = 1e-12
_SCAN_HI = 1e12


@dataclass(frozen=True)
class PrimalSolution:
    """Value, strategy and dual root at one (t, x) point."""

    t: float
    x: float
    y_star: float
    value: float
    strategy: float
    stopped: bool


@dataclass(frozen=True)
class PathRecord:
    """One simulated optimal-wealth path."""

    times: np.ndarray
    wealth: np.ndarray
    strategy: np.ndarray
    stop_time: float  # first boundary hit, or T when the path never stops
    seed: int


def _decade_scan(f, y0: float) -> tuple[float, float]:
    """Walk y by factors of ten until f changes sign; f is increasing in y."""
    y = y0
    fy = f(y)
    if fy == 0.0:
        return y, y
    step = 0.1 if fy > 0.0 else 10.0
    while True:
        y_next = y * step
        if not _SCAN_LO <= y_next <= _SCAN_HI:
            raise ScanFailure(
                f"no sign change of the dual-price equation within [{_SCAN_LO:g}, {_SCAN_HI:g}]"
            )
        f_next = f(y_next)
        if fy * f_next <= 0.0:
            return (y_next, y) if step < 1.0 else (y, y_next)
        y, fy = y_next, f_next


class PrimalSolver:
    """Couples the closed-form boundary with the dual evaluator."""

    def __init__(
        self,
        params: ModelParams,
        utility: DualUtilityFamily,
        boundary: GcaBoundary | None = None,
        evaluator: DualValueEvaluator | None = None,
    ):
        self.params = params
        self.utility = utility
        self.boundary = boundary if boundary is not None else GcaBoundary.build(params, utility)
        self.evaluator = (
            evaluator
            if evaluator is not None
            else DualValueEvaluator.for_boundary(self.boundary)
        )

    # -- dual root ---------------------------------------------------------

    def implied_dual(self, t: float, x: float, y_init: float | None = None) -> float:
        """The dual price solving ``dual_value_y(t, y) + x = 0`` for x > K."""
        if x <= self.utility.K:
            raise DomainError(
                f"wealth {x} must exceed the floor {self.utility.K}: the dual root diverges"
            )

        def f(y: float) -> float:
            return self.evaluator.dy(t, y) + x

        lo, hi = _decade_scan(f, y_init if y_init is not None else 1.0)
        if lo == hi:
            return lo
        return find_root(f, Bracket(lo, hi, tol_abs=1e-15, tol_rel=1e-10))

    def _obstacle_dual(self, x: float) -> float:
        """Dual price paired with wealth x on the payoff itself."""

        def f(y: float) -> float:
            return self.utility.dual_deriv(y) + x

        lo, hi = _decade_scan(f, 1.0)
        if lo == hi:
            return lo
        return find_root(f, Bracket(lo, hi, tol_abs=1e-15, tol_rel=1e-12))

    # -- value and strategy --------------------------------------------------

    def solve(self, t: float, x: float) -> PrimalSolution:
        """Value, strategy and dual root at (t, x); x > K required.

        Wealth at or above the exercise boundary x(t) stops immediately and
        collects the payoff; below it the dual representation applies.
        """
        if x <= self.utility.K:
            raise DomainError(f"wealth {x} must exceed the floor {self.utility.K}")
        x_bnd = self.boundary.primal_boundary(t)
        if x >= x_bnd:
            value = self.utility.primal_utility(x - self.utility.K)
            return PrimalSolution(t, x, self._obstacle_dual(x), value, 0.0, True)
        y = self.implied_dual(t, x)
        value = self.evaluator.value(t, y) + x * y
        d = self.boundary.derived
        strategy = d.theta / self.params.sigma * y * self.evaluator.dyy(t, y)
        return PrimalSolution(t, x, y, value, strategy, False)

    def value(self, t: float, x: float) -> float:
        return self.solve(t, x).value

    def strategy(self, t: float, x: float) -> float:
        return self.solve(t, x).strategy

    # -- simulation ----------------------------------------------------------

    def simulate(
        self, x0: float, n_paths: int, n_steps: int, seed: int
    ) -> list[PathRecord]:
        """Euler paths of optimal wealth; strategy freezes to zero at the boundary."""
        if n_steps < 10:
            raise ValueError("n_steps must be at least 10")
        x_start = self.boundary.primal_boundary(0.0)
        if x0 >= x_start:
            raise DomainError(
                f"initial wealth {x0} is already in the stopping region (boundary {x_start:g})"
            )
        T = self.boundary.horizon
        times = np.linspace(0.0, T, n_steps + 1)
        seeds = np.random.SeedSequence(seed).spawn(n_paths)
        records = []
        for k in range(n_paths):
            draws = np.random.default_rng(seeds[k]).standard_normal(n_steps)
            records.append(self._simulate_one(times, x0, draws, seed))
        return records

    def _simulate_one(
        self, times: np.ndarray, x0: float, draws: np.ndarray, seed: int
    ) -> PathRecord:
        p = self.params
        d = self.boundary.derived
        n_steps = len(times) - 1
        dt = times[1] - times[0]
        sqrt_dt = math.sqrt(dt)
        growth = math.exp(p.r * dt)

        wealth = np.empty(n_steps + 1)
        strat = np.zeros(n_steps + 1)
        wealth[0] = x0
        stop_time = times[-1]
        stopped = False
        y_prev: float | None = None

        for i in range(n_steps + 1):
            t = float(times[i])
            x = float(wealth[i])
            if not stopped and x >= self.boundary.primal_boundary(t):
                stopped = True
                stop_time = t
            if stopped or x <= self.utility.K:
                pi = 0.0
            else:
                y_prev = self.implied_dual(t, x, y_init=y_prev)
                pi = d.theta / p.sigma * y_prev * self.evaluator.dyy(t, y_prev)
            strat[i] = pi
            if i < n_steps:
                if stopped:
                    wealth[i + 1] = x * growth
                else:
                    wealth[i + 1] = (
                        x
                        + (p.r * x + p.sigma * pi * d.theta) * dt
                        + p.sigma * pi * sqrt_dt * float(draws[i])
                    )
        return PathRecord(times, wealth, strat, stop_time, seed)
