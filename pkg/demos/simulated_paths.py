"""Simulated optimal wealth paths with the stop-and-freeze rule.

Wealth follows the controlled diffusion under the feedback strategy; at the
first time the path rises into the falling exercise boundary, trading stops
and wealth rolls up at the riskless rate.  Writes per-path CSVs for the
plotting frontend.
"""

from pathlib import Path

from freebound import DualUtilityFamily, ModelParams, PrimalSolver

params = ModelParams(mu=0.1, r=0.05, sigma=0.3, beta=0.1, T=1.0, K=1.0)
out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

for name, utility, x0 in [
    ("power", DualUtilityFamily.power(0.5, K=1.0), 1.4),
    ("non_hara", DualUtilityFamily.non_hara(K=1.0), 1.5),
]:
    solver = PrimalSolver(params, utility)
    records = solver.simulate(x0, n_paths=2, n_steps=250, seed=42)
    for k, rec in enumerate(records):
        stopped = "stopped at t=%.3f" % rec.stop_time if rec.stop_time < params.T else "ran to maturity"
        print(f"{name} path {k}: X(0)={x0}, X(T)={rec.wealth[-1]:.4f}, {stopped}")
        lines = [
            "# freebound-csv/1",
            f"# seed=42 path={k} stop_time={rec.stop_time:.10g}",
            "t,X,pi",
        ]
        lines += [
            f"{t:.10g},{x:.10g},{pi:.10g}"
            for t, x, pi in zip(rec.times, rec.wealth, rec.strategy)
        ]
        path = out_dir / f"path_{name}_{k}.csv"
        path.write_text("\n".join(lines) + "\n")
        print(f"  wrote {path}")
