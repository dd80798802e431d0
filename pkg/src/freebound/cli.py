"""Command-line interface: classify, boundary, value, compare, table2, simulate.

Configuration is a single JSON document; stdout carries data only (JSON or
versioned CSV), diagnostics go to stderr.  Exit codes: 0 ok, 1 usage or
config error, 2 standing assumption violated, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import btm, fd
from .boundary import GcaBoundary
from .dualvalue import DualValueEvaluator
from .errors import (
    AssumptionViolated,
    ConfigError,
    FreeboundError,
)
from .model import ModelParams, RegimeCase, classify_regime, derive_params, validate_assumption
from .primal import PrimalSolver
from .utility import DualUtilityFamily

CSV_HEADER = "# freebound-csv/1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSUMPTION = 2
EXIT_NUMERICAL = 3


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def _load_config(path: str) -> tuple[ModelParams, DualUtilityFamily]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        params = ModelParams(
            mu=float(raw["mu"]),
            r=float(raw["r"]),
            sigma=float(raw["sigma"]),
            beta=float(raw["beta"]),
            T=float(raw["T"]),
            K=float(raw["K"]),
        )
        u = raw["utility"]
        kind = u["type"]
        if kind == "power":
            utility = DualUtilityFamily.power(float(u["gamma"]), params.K)
        elif kind == "non_hara":
            utility = DualUtilityFamily.non_hara(params.K)
        elif kind == "dual_sum":
            utility = DualUtilityFamily.custom([float(q) for q in u["q"]], params.K)
        else:
            raise ConfigError(f"unknown utility type {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    return params, utility


def _max_workers() -> int:
    cap = os.environ.get("FREEBOUND_THREADS")
    if cap:
        try:
            return max(1, int(cap))
        except ValueError:
            raise ConfigError(f"FREEBOUND_THREADS must be an integer, got {cap!r}")
    return os.cpu_count() or 1


def _emit(lines: list[str], out: str | None, filename: str) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        target = Path(out)
        target.mkdir(parents=True, exist_ok=True)
        (target / filename).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------


def cmd_classify(args) -> int:
    params, utility = _load_config(args.config)
    regime = classify_regime(params, utility)
    try:
        validate_assumption(params, utility)
        assumption = {"holds": True}
    except AssumptionViolated as exc:
        assumption = {"holds": False, "quantity": exc.quantity, "value": exc.value}
    derived = derive_params(params)
    report = {
        "case": regime.case.value,
        "a_values": list(regime.a_values),
        "discriminant": regime.discriminant,
        "limits": regime.limits,
        "beta_thresholds": (
            dict(zip(("beta1", "beta2", "beta3", "beta4"), regime.beta_thresholds))
            if regime.beta_thresholds
            else None
        ),
        "derived": {
            "theta": derived.theta,
            "nu": derived.nu,
            "rho": derived.rho,
            "kappa": derived.kappa,
            "lambda": derived.lam,
            "tau_max": derived.tau_max,
        },
        "assumption": assumption,
    }
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_boundary(args) -> int:
    params, utility = _load_config(args.config)
    validate_assumption(params, utility)
    boundary = GcaBoundary.build(params, utility)
    derived = boundary.derived
    n = args.points
    ts = np.linspace(0.0, params.T, n)

    btm_curve = None
    if args.with_btm:
        y_anchor = math.exp(0.5 * (boundary.z0 + boundary.z_star))
        cfg = btm.TreeConfig(derived, utility, y_anchor, args.btm_steps)
        result = btm.tree_value(cfg)
        btm_times, btm_wealth = btm.wealth_boundary(result, cfg)
        btm_curve = (btm_times, btm_wealth)

    fd_sol = None
    if args.with_fd:
        fd_sol = fd.solve_obstacle(fd.default_config(derived, utility), derived, utility)

    lines = [CSV_HEADER]
    cols = ["t", "tau", "z_star", "y_star", "x_boundary"]
    if btm_curve is not None:
        cols.append("x_btm")
    if fd_sol is not None:
        cols.append("z_fd")
    lines.append(",".join(cols))

    max_gap = 0.0
    for t in ts:
        tau = boundary.tau_of_t(float(t))
        z = boundary.curve(tau)
        row = [t, tau, z, math.exp(z), boundary.primal_boundary(float(t))]
        if btm_curve is not None:
            idx = int(np.argmin(np.abs(btm_curve[0] - t)))
            row.append(btm_curve[1][idx])
        if fd_sol is not None:
            zf = fd_sol.boundary_at(tau) if tau > 0 else boundary.z0
            row.append(zf)
            if np.isfinite(zf):
                max_gap = max(max_gap, abs(z - zf))
        lines.append(",".join(_fmt(v) for v in row))
    if fd_sol is not None:
        lines.append(f"# max_abs_z_gap_fd={_fmt(max_gap)}")
    _emit(lines, args.out, "boundary.csv")
    return EXIT_OK


def cmd_value(args) -> int:
    params, utility = _load_config(args.config)
    validate_assumption(params, utility)
    solver = PrimalSolver(params, utility)
    if args.quad_tol is not None:
        solver.evaluator = DualValueEvaluator.for_boundary(
            solver.boundary, quad_tol=args.quad_tol
        )
    sol = solver.solve(args.t, args.x)
    sys.stdout.write(
        json.dumps(
            {"V": sol.value, "pi": sol.strategy, "y_star": sol.y_star, "stopped": sol.stopped},
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return EXIT_OK


def _compare_once(
    params: ModelParams, utility: DualUtilityFamily, x: float, n_steps: int
) -> dict:
    t0 = time.perf_counter()
    solver = PrimalSolver(params, utility)
    sol = solver.solve(0.0, x)
    t_gca = time.perf_counter() - t0

    t0 = time.perf_counter()
    btm_value, btm_strategy, _ = btm.primal_estimate(x, params, utility, n_steps)
    t_btm = time.perf_counter() - t0
    # comparison tables quote strategies as the fraction of wealth at risk
    return {
        "gca_value": sol.value,
        "gca_strategy": sol.strategy / x,
        "btm_value": btm_value,
        "btm_strategy": btm_strategy / x,
        "time_gca": t_gca,
        "time_btm": t_btm,
    }


def cmd_compare(args) -> int:
    params, utility = _load_config(args.config)
    validate_assumption(params, utility)
    r = _compare_once(params, utility, args.x, args.btm_steps)
    diff_v = abs(r["gca_value"] - r["btm_value"])
    diff_s = abs(r["gca_strategy"] - r["btm_strategy"])
    lines = [
        CSV_HEADER,
        "metric,value,strategy",
        f"gca,{_fmt(r['gca_value'])},{_fmt(r['gca_strategy'])}",
        f"btm,{_fmt(r['btm_value'])},{_fmt(r['btm_strategy'])}",
        f"difference,{_fmt(diff_v)},{_fmt(diff_s)}",
        f"relative_difference,{_fmt(diff_v / abs(r['btm_value']))},{_fmt(diff_s / abs(r['btm_strategy']))}",
        f"time_gca_seconds,{_fmt(r['time_gca'])},{_fmt(r['time_gca'])}",
        f"time_btm_seconds,{_fmt(r['time_btm'])},{_fmt(r['time_btm'])}",
    ]
    _emit(lines, args.out, "compare.csv")
    return EXIT_OK


_TABLE2_RANGES = {
    "mu": (0.05, 0.15),
    "r": (0.02, 0.08),
    "beta": (0.05, 0.15),
    "sigma": (0.10, 0.40),
    "gamma": (0.2, 0.6),
}
_TABLE2_X = 1.5
_MAX_RESAMPLE = 1000


def _table2_sample(rng: np.random.Generator, kind: str) -> tuple[ModelParams, DualUtilityFamily]:
    for _ in range(_MAX_RESAMPLE):
        draw = {k: rng.uniform(*v) for k, v in _TABLE2_RANGES.items()}
        try:
            params = ModelParams(
                mu=draw["mu"], r=draw["r"], sigma=draw["sigma"], beta=draw["beta"], T=1.0, K=1.0
            )
            utility = (
                DualUtilityFamily.power(draw["gamma"], params.K)
                if kind == "power"
                else DualUtilityFamily.non_hara(params.K)
            )
            validate_assumption(params, utility)
            # the lattice probability must also be admissible at these params
            btm._lattice_params(btm.TreeConfig(derive_params(params), utility, 1.0, 700))
            return params, utility
        except FreeboundError:
            continue
    raise ConfigError("could not draw admissible parameters after resampling cap")


def cmd_table2(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    for kind in ("power", "non_hara"):
        samples = [_table2_sample(rng, kind) for _ in range(args.samples)]

        def one(pu):
            return _compare_once(pu[0], pu[1], _TABLE2_X, args.btm_steps)

        with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
            results = list(pool.map(one, samples))

        for quantity in ("value", "strategy"):
            gca = np.array([r[f"gca_{quantity}"] for r in results])
            ref = np.array([r[f"btm_{quantity}"] for r in results])
            absd = np.abs(gca - ref)
            reld = absd / np.abs(ref)
            rows.append(
                (kind, quantity, absd.mean(), absd.std(), reld.mean(), reld.std())
            )
        t_gca = float(np.mean([r["time_gca"] for r in results]))
        t_btm = float(np.mean([r["time_btm"] for r in results]))
        print(
            f"[table2] {kind}: avg time gca {t_gca:.3f}s, btm {t_btm:.3f}s",
            file=sys.stderr,
        )
    lines = [CSV_HEADER, "utility,quantity,avg_abs_diff,std_abs_diff,avg_rel_diff,std_rel_diff"]
    for kind, quantity, am, asd, rm, rsd in rows:
        lines.append(f"{kind},{quantity},{_fmt(am)},{_fmt(asd)},{_fmt(rm)},{_fmt(rsd)}")
    _emit(lines, args.out, "table2.csv")
    return EXIT_OK


def cmd_simulate(args) -> int:
    params, utility = _load_config(args.config)
    validate_assumption(params, utility)
    if not args.out:
        raise ConfigError("simulate requires --out DIR for the per-path CSV files")
    solver = PrimalSolver(params, utility)
    records = solver.simulate(args.x0, args.paths, args.steps, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, rec in enumerate(records):
        lines = [
            CSV_HEADER,
            f"# seed={args.seed} path={k} stop_time={_fmt(rec.stop_time)}",
            "t,X,pi",
        ]
        for t, x, pi in zip(rec.times, rec.wealth, rec.strategy):
            lines.append(f"{_fmt(t)},{_fmt(x)},{_fmt(pi)}")
        (out / f"path_{k:03d}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"[simulate] wrote {len(records)} path files to {out}", file=sys.stderr)
    return EXIT_OK


# -- entry point -------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors must exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="freebound", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="output directory (default: stdout)")

    p = sub.add_parser("classify", help="regime taxonomy and derived constants")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("boundary", help="exercise boundary CSV over [0, T]")
    common(p)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--with-btm", action="store_true")
    p.add_argument("--with-fd", action="store_true")
    p.add_argument("--btm-steps", type=int, default=700)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("value", help="value/strategy at one (t, x) point")
    common(p)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--quad-tol", type=float, default=None)
    p.set_defaults(func=cmd_value)

    p = sub.add_parser("compare", help="closed-form vs lattice comparison table")
    common(p)
    p.add_argument("--x", type=float, default=1.5)
    p.add_argument("--btm-steps", type=int, default=700)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("table2", help="randomized agreement statistics")
    common(p, config=False)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--btm-steps", type=int, default=700)
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("simulate", help="optimal wealth paths as per-path CSVs")
    common(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--paths", type=int, default=2)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AssumptionViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FreeboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
