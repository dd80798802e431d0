"""Binomial-tree oracle for the dual stopping problem.

A recombining lattice for the dual price (drift beta - r, volatility |theta|,
utility-rate discounting) is rolled back with the obstacle taken at every
node.  The initial dual price for a given wealth is found exactly as a
decade scan plus plain bisection on the bumped first derivative; value and
strategy derivatives come from whole-tree re-evaluation at bumped roots
rather than from reading interior nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ProbabilityOutOfRange, ScanFailure
from .model import DerivedParams, ModelParams, derive_params
from .utility import DualUtilityFamily, family_a_values

__all__ = [
    "TreeConfig",
    "TreeResult",
    "tree_value",
    "find_initial_dual",
    "primal_estimate",
    "wealth_boundary",
    "european_closed_form",
]

_SCAN_LO = 1e-12
_SCAN_HI = 1e12
_BUMP = 1e-4
# second differences need a step large enough to dominate the lattice's
# alignment noise (value error ~1e-6 at N=700 -> h ~ (eps/V'''')^(1/4) ~ 1e-2)
_BUMP_SECOND = 1e-2


@dataclass(frozen=True)
class TreeConfig:
    """Lattice parameters; rates are recovered from the dimensionless constants."""

    derived: DerivedParams
    utility: DualUtilityFamily
    y0: float
    n_steps: int = 700

    def __post_init__(self) -> None:
        if self.n_steps < 2:
            raise ValueError("n_steps must be at least 2")
        if self.y0 <= 0:
            raise ValueError("y0 must be positive")

    @property
    def horizon(self) -> float:
        return 2.0 * self.derived.tau_max / self.derived.theta**2

    @property
    def rate_r(self) -> float:
        return 0.5 * self.derived.nu * self.derived.theta**2

    @property
    def rate_beta(self) -> float:
        return 0.5 * self.derived.rho * self.derived.theta**2


@dataclass(frozen=True)
class TreeResult:
    value_at_root: float
    # per decision step, the largest lattice dual price at which exercising is
    # optimal (NaN when the step has no exercising node)
    exercise_boundary: np.ndarray
    dual_dy_at_root: float | None = None


def _obstacle_vec(y: np.ndarray, utility: DualUtilityFamily) -> np.ndarray:
    out = -utility.K * y
    for q in utility.exponents:
        out = out - (1.0 / q) * y**q
    return out


def _lattice_params(cfg: TreeConfig) -> tuple[float, float, float, float]:
    dt = cfg.horizon / cfg.n_steps
    up = math.exp(abs(cfg.derived.theta) * math.sqrt(dt))
    down = 1.0 / up
    prob = (math.exp((cfg.rate_beta - cfg.rate_r) * dt) - down) / (up - down)
    if not 0.0 < prob < 1.0:
        raise ProbabilityOutOfRange(
            f"step probability {prob:g} outside (0, 1); reduce the time step"
        )
    return dt, up, down, prob


def _roll_back(cfg: TreeConfig, american: bool, want_boundary: bool):
    n = cfg.n_steps
    dt, up, _, prob = _lattice_params(cfg)
    disc = math.exp(-cfg.rate_beta * dt)

    # all lattice prices are y0 * up**m for m in [-n, n]
    m = np.arange(-n, n + 1)
    y_all = cfg.y0 * up ** m.astype(float)
    obstacle_all = _obstacle_vec(y_all, cfg.utility)

    values = obstacle_all[0 : 2 * n + 1 : 2].copy()  # terminal layer, m = -n..n step 2
    boundary = np.full(n, np.nan) if want_boundary else None

    for i in range(n - 1, -1, -1):
        cont = disc * (prob * values[1 : i + 2] + (1.0 - prob) * values[0 : i + 1])
        obstacle = obstacle_all[n - i : n + i + 1 : 2]
        if american:
            exercise = obstacle >= cont
            values = np.where(exercise, obstacle, cont)
            if want_boundary:
                idx = np.nonzero(exercise)[0]
                if idx.size:
                    boundary[i] = y_all[n - i + 2 * idx[-1]]
        else:
            values = cont
    return float(values[0]), boundary


def tree_value(cfg: TreeConfig, american: bool = True, with_derivative: bool = False) -> TreeResult:
    """Roll the lattice back to the root; optionally bump-estimate d/dy."""
    value, boundary = _roll_back(cfg, american, want_boundary=True)
    dy = None
    if with_derivative:
        dy = _tree_dy(cfg, american)
    return TreeResult(value, boundary, dy)


def _tree_root_value(cfg: TreeConfig, y: float, american: bool = True) -> float:
    bumped = TreeConfig(cfg.derived, cfg.utility, y, cfg.n_steps)
    return _roll_back(bumped, american, want_boundary=False)[0]


def _tree_dy(cfg: TreeConfig, american: bool = True, bump: float = _BUMP) -> float:
    up = _tree_root_value(cfg, cfg.y0 * (1.0 + bump), american)
    dn = _tree_root_value(cfg, cfg.y0 * (1.0 - bump), american)
    return (up - dn) / (2.0 * bump * cfg.y0)


def find_initial_dual(
    x: float,
    derived: DerivedParams,
    utility: DualUtilityFamily,
    n_steps: int = 700,
    rel_tol: float = 1e-8,
) -> float:
    """Initial dual price solving the bumped-derivative equation d/dy + x = 0.

    Decade scan for a sign change (the target is increasing in y), then plain
    bisection until the interval is below ``rel_tol`` times the midpoint.
    """
    if x <= utility.K:
        raise DomainError(f"wealth {x} must exceed the floor {utility.K}")

    def f(y: float) -> float:
        cfg = TreeConfig(derived, utility, y, n_steps)
        return _tree_dy(cfg) + x

    y = 1.0
    fy = f(y)
    if fy == 0.0:
        return y
    step = 0.1 if fy > 0.0 else 10.0
    while True:
        y_next = y * step
        if not _SCAN_LO <= y_next <= _SCAN_HI:
            raise ScanFailure("decade scan left the admissible dual-price range")
        f_next = f(y_next)
        if fy * f_next <= 0.0:
            lo, hi = (y_next, y) if step < 1.0 else (y, y_next)
            break
        y, fy = y_next, f_next

    while hi - lo > rel_tol * 0.5 * (lo + hi):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def primal_estimate(
    x: float,
    params: ModelParams,
    utility: DualUtilityFamily,
    n_steps: int = 700,
) -> tuple[float, float, float]:
    """(value, strategy, dual root) at time zero for wealth x, all lattice-based."""
    derived = derive_params(params)
    y = find_initial_dual(x, derived, utility, n_steps)
    cfg = TreeConfig(derived, utility, y, n_steps)
    center = _tree_root_value(cfg, y)
    up = _tree_root_value(cfg, y * (1.0 + _BUMP_SECOND))
    dn = _tree_root_value(cfg, y * (1.0 - _BUMP_SECOND))
    value = center + x * y
    second = (up - 2.0 * center + dn) / (_BUMP_SECOND * y) ** 2
    strategy = derived.theta / params.sigma * y * second
    return value, strategy, y


def wealth_boundary(result: TreeResult, cfg: TreeConfig) -> tuple[np.ndarray, np.ndarray]:
    """Map the per-step dual exercise levels to calendar times and wealth."""
    n = cfg.n_steps
    dt = cfg.horizon / n
    times = np.arange(n) * dt
    wealth = np.full(n, np.nan)
    for i, yb in enumerate(result.exercise_boundary):
        if np.isfinite(yb):
            wealth[i] = cfg.utility.wealth_of_dual(float(yb))
    return times, wealth


def european_closed_form(y: float, derived: DerivedParams, utility: DualUtilityFamily) -> float:
    """Discounted expectation of the dual payoff at the horizon (lognormal moments)."""
    a = family_a_values(utility.exponents, derived.kappa, derived.rho)
    tau = derived.tau_max
    total = 0.0
    for aj, q in zip(a, utility.exponents):
        total += -(1.0 / q) * y**q * math.exp(q * aj * tau)
    return total - utility.K * y * math.exp(-derived.nu * tau)
