"""Finite-difference oracle: the log-coordinate obstacle problem by projected SOR.

Marches ``min(v_tau - v_zz + kappa v_z + rho v, v - g) = 0`` forward in scaled
time with Crank-Nicolson (Rannacher-damped) or fully implicit steps, solving
the per-step linear complementarity problem by projected SOR in red-black
ordering.  The free boundary is read off as the last obstacle-contact node of
each layer (the contact set is left-connected).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import solve_z0
from .errors import AssumptionViolated, PsorNotConverged
from .model import DerivedParams
from .utility import DualUtilityFamily

__all__ = ["FdConfig", "FdSolution", "default_config", "solve_obstacle"]


@dataclass(frozen=True)
class FdConfig:
    z_min: float
    z_max: float
    n_z: int = 1200
    n_tau: int = 400
    omega: float = 1.5
    psor_tol: float = 1e-10
    scheme: str = "crank_nicolson"  # or "implicit"
    horizon: float | None = None  # scaled time; defaults to tau_max
    rannacher_steps: int = 2
    max_psor_iter: int = 100_000

    def __post_init__(self) -> None:
        if not self.z_min < self.z_max:
            raise ValueError("z_min must be below z_max")
        if self.n_z < 200:
            raise ValueError("n_z must be at least 200")
        if self.n_tau < 1:
            raise ValueError("n_tau must be positive")
        if not 1.0 < self.omega < 2.0:
            raise ValueError("omega must lie in (1, 2)")
        if self.scheme not in ("crank_nicolson", "implicit"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass(frozen=True)
class FdSolution:
    taus: np.ndarray
    zs: np.ndarray
    values: np.ndarray  # (n_tau + 1, n_z + 1)
    boundary: np.ndarray  # largest contact z per layer; NaN at tau = 0
    max_complementarity: float

    def boundary_at(self, tau: float) -> float:
        """Boundary level at scaled time tau (nearest computed layer, tau > 0)."""
        idx = int(np.argmin(np.abs(self.taus - tau)))
        if idx == 0:
            idx = 1
        return float(self.boundary[idx])


def default_config(derived: DerivedParams, utility: DualUtilityFamily, **overrides) -> FdConfig:
    """Grid centered on the short-maturity boundary level, six log units wide."""
    z0 = solve_z0(derived, utility)
    base = dict(z_min=z0 - 6.0, z_max=z0 + 6.0)
    base.update(overrides)
    return FdConfig(**base)


def solve_obstacle(
    cfg: FdConfig, derived: DerivedParams, utility: DualUtilityFamily
) -> FdSolution:
    """Time-march the obstacle problem and extract the free boundary."""
    try:
        z0 = solve_z0(derived, utility)
    except AssumptionViolated:
        z0 = None
    if z0 is not None:
        if not (cfg.z_min < z0 - 2.0 and cfg.z_max > z0 + 3.0):
            raise ValueError(
                f"grid [{cfg.z_min}, {cfg.z_max}] does not enclose the boundary level "
                f"{z0:.4f} with the required margins"
            )

    horizon = cfg.horizon if cfg.horizon is not None else derived.tau_max
    n_z, n_tau = cfg.n_z, cfg.n_tau
    zs = np.linspace(cfg.z_min, cfg.z_max, n_z + 1)
    dz = zs[1] - zs[0]
    dtau = horizon / n_tau
    taus = np.linspace(0.0, horizon, n_tau + 1)

    g = np.array([utility.obstacle(float(z)) for z in zs])
    scale = float(np.max(np.abs(g))) + 1.0

    # operator A v = -v_zz + kappa v_z + rho v on the interior, central differences
    lower_a = -1.0 / dz**2 - derived.kappa / (2.0 * dz)
    diag_a = 2.0 / dz**2 + derived.rho
    upper_a = -1.0 / dz**2 + derived.kappa / (2.0 * dz)

    values = np.empty((n_tau + 1, n_z + 1))
    values[0] = g
    boundary = np.full(n_tau + 1, np.nan)
    max_comp = 0.0

    v = g.copy()
    for m in range(1, n_tau + 1):
        theta_s = 1.0 if (m <= cfg.rannacher_steps or cfg.scheme == "implicit") else 0.5

        # rhs: (I - dtau (1 - theta_s) A) v^m on interior nodes
        b = v.copy()
        if theta_s < 1.0:
            av = lower_a * v[:-2] + diag_a * v[1:-1] + upper_a * v[2:]
            b[1:-1] -= dtau * (1.0 - theta_s) * av

        sub = dtau * theta_s * lower_a
        dia = 1.0 + dtau * theta_s * diag_a
        sup = dtau * theta_s * upper_a

        v = _psor_step(v, b, g, sub, dia, sup, cfg, scale)
        values[m] = v

        residual = (dia * v[1:-1] + sub * v[:-2] + sup * v[2:]) - b[1:-1]
        comp = np.max((v[1:-1] - g[1:-1]) * residual)
        max_comp = max(max_comp, float(comp) / scale)

        contact = v - g <= 1e-12 * (1.0 + np.abs(g))
        non_contact = np.nonzero(~contact)[0]
        if non_contact.size:
            first_free = int(non_contact[0])
            boundary[m] = zs[first_free - 1] if first_free > 0 else np.nan
        else:
            boundary[m] = zs[-1]

    return FdSolution(taus, zs, values, boundary, max_comp)


def _psor_step(
    v0: np.ndarray,
    b: np.ndarray,
    g: np.ndarray,
    sub: float,
    dia: float,
    sup: float,
    cfg: FdConfig,
    scale: float,
) -> np.ndarray:
    """Projected SOR sweeps (red-black ordering) for one time layer.

    Dirichlet value at the left end (deep exercise region), zero second
    difference at the right end (payoff tail is asymptotically linear in the
    dual price at fixed time).
    """
    v = v0.copy()
    v[0] = g[0]
    n = len(v) - 1
    omega = cfg.omega
    interior = np.arange(1, n)
    red = interior[interior % 2 == 1]
    black = interior[interior % 2 == 0]

    for _ in range(cfg.max_psor_iter):
        for idx in (red, black):
            gs = (b[idx] - sub * v[idx - 1] - sup * v[idx + 1]) / dia
            v[idx] = np.maximum(g[idx], v[idx] + omega * (gs - v[idx]))
        v[n] = 2.0 * v[n - 1] - v[n - 2]
        # semismooth LCP residual min(Mv - b, v - g) and the complementarity
        # product must both vanish at the tolerance
        lin = (dia * v[1:-1] + sub * v[:-2] + sup * v[2:]) - b[1:-1]
        gap = v[1:-1] - g[1:-1]
        resid = np.minimum(lin, gap)
        if (
            np.max(np.abs(resid)) <= cfg.psor_tol * scale
            and np.max(gap * lin) <= cfg.psor_tol * scale
        ):
            return v
    raise PsorNotConverged(
        f"projected SOR exceeded {cfg.max_psor_iter} sweeps at tolerance {cfg.psor_tol:g}"
    )
