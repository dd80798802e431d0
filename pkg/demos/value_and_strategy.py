"""Value and optimal strategy across wealth, closed form vs lattice oracle.

Sweeps wealth through the continuation region into the stopping region and
prints value, risky position, and the dual root; then reproduces the headline
comparison at x = 1.5 for both utilities.
"""

import time

import numpy as np

from freebound import DualUtilityFamily, ModelParams, PrimalSolver
from freebound.btm import primal_estimate

params = ModelParams(mu=0.1, r=0.05, sigma=0.3, beta=0.1, T=1.0, K=1.0)

for name, utility in [
    ("power", DualUtilityFamily.power(0.5, K=1.0)),
    ("non_hara", DualUtilityFamily.non_hara(K=1.0)),
]:
    solver = PrimalSolver(params, utility)
    x_bnd = solver.boundary.primal_boundary(0.0)
    print(f"\n{name}: wealth boundary at t=0 is {x_bnd:.4f}")
    print(f"{'x':>6} {'V':>10} {'pi':>8} {'pi/x':>8} {'y*':>8} stopped")
    for x in np.arange(1.1, x_bnd + 0.1, 0.05):
        sol = solver.solve(0.0, float(x))
        print(f"{x:6.2f} {sol.value:10.5f} {sol.strategy:8.4f} "
              f"{sol.strategy / x:8.4f} {sol.y_star:8.4f} {sol.stopped}")

    t0 = time.perf_counter()
    sol = solver.solve(0.0, 1.5)
    dt_gca = time.perf_counter() - t0
    t0 = time.perf_counter()
    value, strategy, _ = primal_estimate(1.5, params, utility, n_steps=700)
    dt_btm = time.perf_counter() - t0
    print(f"  closed form: V={sol.value:.4f} pi/x={sol.strategy / 1.5:.4f} ({dt_gca:.2f}s)")
    print(f"  lattice    : V={value:.4f} pi/x={strategy / 1.5:.4f} ({dt_btm:.2f}s)")
    print(f"  |value gap| = {abs(sol.value - value):.4f}")
