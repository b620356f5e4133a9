"""Command-line front end: analytic tables, simulation sweeps, optimisation.

Every command is a pure function of its flags (plus an optional JSON config
file whose keys mirror the long flag names; flags override the file).  Rows
are written in deterministic grid order with shortest round-trip float
formatting, so identical invocations produce byte-identical CSV.

Exit codes: 0 success, 1 usage error, 2 infeasible/unstable scenario,
3 simulation produced no data.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from . import chain, split
from .chain import ChainParams
from .optimize import minimize_aoi_chain, minimize_aoi_split
from .sim import NetworkSpec, NoDataError, UnstableNetworkError, run, validate_burke
from .split import SplitParams

SCHEMA = [
    "scenario", "K", "mu", "lambda", "rho", "p", "seed", "horizon",
    "delay_analytic", "aoi_analytic",
    "delay_sim", "delay_sim_ci95",
    "aoi_sim_system", "aoi_sim_system_ci95",
    "aoi_sim_mixture", "aoi_sim_mixture_ci95",
    "ewy_analytic", "ewy_sim", "ewy_sim_ci95",
    "n_departures",
]
# compare mode appends these two columns after the fixed schema
COMPARE_EXTRA = ["rel_gap_aoi", "bound_violation"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NO_DATA = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 1 on usage errors instead of the default 2."""

    def error(self, message):
        raise UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def _parse_float_list(text: str, name: str) -> list[float]:
    """Either 'start:stop:step' or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start_s, stop_s, step_s = text.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
            if step <= 0 or stop < start:
                raise ValueError
            n = int((stop - start) / step + 1e-9) + 1
            return [round(start + i * step, 12) for i in range(n)]
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"cannot parse --{name} {text!r}") from None


def _parse_int_list(text: str, name: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"cannot parse --{name} {text!r}") from None


@dataclass
class _SimTask:
    scenario: str
    n_nodes: int
    mu: float
    rho: float
    p: Optional[float]
    seed: int
    horizon: float
    warmup: Optional[float]
    replications: int


def _build_spec(task: _SimTask) -> NetworkSpec:
    lam = task.rho * task.mu
    if task.scenario == "chain":
        return NetworkSpec.chain(task.n_nodes, task.mu, lam)
    if task.scenario == "split":
        return NetworkSpec.split(task.mu, lam, task.p)
    return NetworkSpec.multi_ground(task.n_nodes, task.mu, task.rho)


def _simulate_point(task: _SimTask) -> dict:
    """One grid point; replication r uses seed + r.  Returns sim columns."""
    spec = _build_spec(task)
    results = []
    try:
        for r in range(task.replications):
            results.append(run(spec, seed=task.seed + r, horizon=task.horizon, warmup=task.warmup))
    except NoDataError:
        return {"error": "no-data"}

    def pooled(metric, ci_key):
        vals = np.array([getattr(res, metric) for res in results])
        if len(vals) == 1:
            return float(vals[0]), float(results[0].ci95[ci_key])
        half = stats.t.ppf(0.975, len(vals) - 1) * vals.std(ddof=1) / math.sqrt(len(vals))
        return float(vals.mean()), float(half)

    delay, delay_ci = pooled("avg_delay", "delay")
    aoi_sys, aoi_sys_ci = pooled("avg_aoi_system", "aoi_system")
    aoi_mix, aoi_mix_ci = pooled("avg_aoi_mixture", "aoi_mixture")
    ewy, ewy_ci = pooled("ewy_empirical", "ewy")
    return {
        "delay_sim": delay, "delay_sim_ci95": delay_ci,
        "aoi_sim_system": aoi_sys, "aoi_sim_system_ci95": aoi_sys_ci,
        "aoi_sim_mixture": aoi_mix, "aoi_sim_mixture_ci95": aoi_mix_ci,
        "ewy_sim": ewy, "ewy_sim_ci95": ewy_ci,
        "n_departures": sum(res.n_departures for res in results),
    }


def _analytic_columns(scenario: str, n_nodes: int, mu: float, rho: float, p: Optional[float]) -> dict:
    lam = rho * mu
    if scenario == "chain":
        cp = ChainParams(n_nodes, mu, lam)
        return {
            "delay_analytic": chain.network_delay(cp),
            "aoi_analytic": chain.average_aoi(cp),
            "ewy_analytic": chain.ewy_bound(cp),
        }
    if scenario == "split":
        sp = SplitParams(mu, lam, p)
        return {
            "delay_analytic": split.network_delay_split(sp),
            "aoi_analytic": split.aoi_mixture(sp),
            "ewy_analytic": split.ewy_bound_2(sp),
        }
    return {}


def _grid(args) -> list[tuple[int, float, Optional[float]]]:
    """Deterministic grid order: (K, rho, p) nested in that precedence."""
    rho_values = _parse_float_list(args.rho_grid, "rho-grid")
    if not rho_values:
        raise UsageError("--rho-grid produced an empty grid")
    for rho in rho_values:
        if not 0.0 < rho < 1.0:
            raise InfeasibleError(f"rho {rho} outside the stable range (0, 1)")
    if args.scenario == "split":
        p_values = _parse_float_list(args.p_list, "p-list")
        if not p_values:
            raise UsageError("--p-list produced an empty grid")
        for p in p_values:
            if not 0.0 <= p <= 1.0:
                raise UsageError(f"p {p} outside [0, 1]")
        return [(2, rho, p) for p in p_values for rho in rho_values]
    k_values = _parse_int_list(args.k_list, "k-list")
    if not k_values:
        raise UsageError("--k-list produced an empty grid")
    for k in k_values:
        if k < 1:
            raise UsageError(f"K {k} must be >= 1")
    return [(k, rho, None) for k in k_values for rho in rho_values]


class InfeasibleError(Exception):
    pass


def _write_csv(path: str, header: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in header])


def _run_sim_grid(args, points: list[tuple[int, float, Optional[float]]]) -> list[dict]:
    warmup = args.warmup if args.warmup is not None else None
    tasks = [
        _SimTask(
            scenario=args.scenario, n_nodes=k, mu=args.mu, rho=rho, p=p,
            seed=args.seed, horizon=args.horizon, warmup=warmup,
            replications=args.replications,
        )
        for (k, rho, p) in points
    ]
    workers = max(1, min(args.workers, len(tasks)))
    if workers == 1:
        return [_simulate_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_simulate_point, tasks))


def _base_row(args, k: int, rho: float, p: Optional[float], with_sim: bool) -> dict:
    return {
        "scenario": args.scenario,
        "K": k,
        "mu": args.mu,
        "lambda": rho * args.mu,
        "rho": rho,
        "p": p,
        "seed": args.seed if with_sim else None,
        "horizon": args.horizon if with_sim else None,
    }


def cmd_table(args) -> int:
    """analyze / simulate / sweep / compare share one grid-to-CSV pipeline."""
    points = _grid(args)
    want_analytic = args.mode in ("analyze", "sweep", "compare")
    want_sim = args.mode in ("simulate", "sweep", "compare")
    if want_analytic and args.scenario == "multi-ground":
        if args.mode == "analyze":
            raise UsageError("scenario 'multi-ground' has no closed form; use simulate")
        # sweep/compare fall back to simulation-only columns

    sim_cols = _run_sim_grid(args, points) if want_sim else [{} for _ in points]

    rows, no_data = [], 0
    for (k, rho, p), sim_row in zip(points, sim_cols):
        row = _base_row(args, k, rho, p, want_sim)
        if want_analytic:
            row.update(_analytic_columns(args.scenario, k, args.mu, rho, p))
        if sim_row.get("error") == "no-data":
            no_data += 1
        else:
            row.update(sim_row)
        rows.append(row)

    header = list(SCHEMA)
    violations = 0
    if args.mode == "compare":
        header += COMPARE_EXTRA
        for row in rows:
            bound = row.get("aoi_analytic")
            ref = row.get("aoi_sim_mixture")
            ci = row.get("aoi_sim_mixture_ci95")
            if bound is None or ref is None:
                continue
            row["rel_gap_aoi"] = (ref - bound) / ref
            viol = int(bound > ref + ci)
            row["bound_violation"] = viol
            violations += viol

    _write_csv(args.out, header, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.mode == "compare":
        gaps = [row["rel_gap_aoi"] for row in rows if "rel_gap_aoi" in row]
        if gaps:
            print(f"bound violations: {violations}/{len(gaps)}; "
                  f"max rel gap aoi: {max(gaps):.4%}")
    if no_data:
        print(f"warning: {no_data} grid point(s) produced no data", file=sys.stderr)
        return EXIT_NO_DATA
    return EXIT_OK


def cmd_optimize(args) -> int:
    rows = []
    if args.scenario == "chain":
        for k in _parse_int_list(args.k_list, "k-list"):
            res = minimize_aoi_chain(k, args.mu, tol=args.tol)
            rows.append({
                "scenario": "chain", "K": k, "mu": args.mu,
                "lambda": res.rho_star * args.mu, "rho": res.rho_star,
                "aoi_analytic": res.aoi_star,
            })
            print(f"K={k}: rho*={res.rho_star:.6f} aoi*={res.aoi_star:.6f}")
    elif args.scenario == "split":
        for p in _parse_float_list(args.p_list, "p-list"):
            res = minimize_aoi_split(args.mu, p, tol=args.tol)
            rows.append({
                "scenario": "split", "K": 2, "mu": args.mu,
                "lambda": res.rho_star * args.mu, "rho": res.rho_star, "p": p,
                "aoi_analytic": res.aoi_star,
            })
            print(f"p={p}: rho*={res.rho_star:.6f} aoi*={res.aoi_star:.6f}")
    else:
        raise UsageError("optimize supports --scenario chain or split")
    _write_csv(args.out, list(SCHEMA), rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_burke(args) -> int:
    k_values = _parse_int_list(args.k_list, "k-list")
    rho_values = _parse_float_list(args.rho_grid, "rho-grid")
    if len(k_values) != 1 or len(rho_values) != 1:
        raise UsageError("burke takes a single K (--k-list) and a single rho (--rho-grid)")
    k, rho = k_values[0], rho_values[0]
    if not 0.0 < rho < 1.0:
        raise InfeasibleError(f"rho {rho} outside the stable range (0, 1)")
    spec = NetworkSpec.chain(k, args.mu, rho * args.mu)
    try:
        report = validate_burke(spec, seed=args.seed, horizon=args.horizon,
                                warmup=args.warmup, node=args.node)
    except UnstableNetworkError:
        raise
    except ValueError as exc:  # precondition violations (K=1, bad node index)
        raise UsageError(str(exc)) from None
    print(f"node {report.node}: {report.n_samples} interdepartures")
    print(f"mean {report.mean!r} (expected {report.expected_mean!r})")
    print(f"KS statistic {report.ks_statistic!r}, p-value {report.p_value!r}")
    print("exponential fit " + ("REJECTED" if report.rejected_at_1pct else "not rejected")
          + " at 1% significance")
    return EXIT_OK


def _add_common(sub: argparse.ArgumentParser, defaults: dict) -> None:
    sub.add_argument("--scenario", choices=["chain", "split", "multi-ground"],
                     default=defaults.get("scenario", "chain"))
    sub.add_argument("--k-list", default=defaults.get("k_list", "1"),
                     help="comma-separated hop counts (chain / multi-ground)")
    sub.add_argument("--rho-grid", default=defaults.get("rho_grid", "0.5"),
                     help="start:stop:step or comma-separated utilisations in (0,1)")
    sub.add_argument("--p-list", default=defaults.get("p_list", "0.5"),
                     help="comma-separated node-1 load fractions (split)")
    sub.add_argument("--mu", type=float, default=defaults.get("mu", 1.0))
    sub.add_argument("--seed", type=int, default=defaults.get("seed", 12345))
    sub.add_argument("--horizon", type=float, default=defaults.get("horizon", 1e6))
    sub.add_argument("--warmup", type=float, default=defaults.get("warmup"),
                     help="defaults to 10%% of the horizon")
    sub.add_argument("--replications", type=int, default=defaults.get("replications", 1))
    sub.add_argument("--workers", type=int,
                     default=defaults.get("workers", min(os.cpu_count() or 1, 8)),
                     help="worker pool size for sweep grids")
    sub.add_argument("--out", default=defaults.get("out"), help="output CSV path")


def _load_config(argv: list[str]) -> dict:
    """Pre-scan for --config and return its keys with dashes normalised."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return {str(key).replace("-", "_"): value for key, value in data.items()}


def _build_parser(defaults: dict) -> _Parser:
    parser = _Parser(prog="aoi-relay", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file whose keys mirror the long flag names")
    subs = parser.add_subparsers(dest="mode", required=True)
    for mode in ("analyze", "simulate", "sweep", "compare"):
        sub = subs.add_parser(mode, parents=[], description=f"{mode} a scenario grid")
        sub.add_argument("--config", help=argparse.SUPPRESS)
        _add_common(sub, defaults)
    opt = subs.add_parser("optimize", description="age-minimising utilisation per K or p")
    opt.add_argument("--config", help=argparse.SUPPRESS)
    _add_common(opt, defaults)
    opt.add_argument("--tol", type=float, default=defaults.get("tol", 1e-3))
    brk = subs.add_parser("burke", description="interdeparture fit at an intermediate node")
    brk.add_argument("--config", help=argparse.SUPPRESS)
    _add_common(brk, defaults)
    brk.add_argument("--node", type=int, default=defaults.get("node", 1),
                     help="1-based intermediate node to probe")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        defaults = _load_config(argv)
        parser = _build_parser(defaults)
        args = parser.parse_args(argv)
        if args.mode in ("analyze", "simulate", "sweep", "compare"):
            if not args.out:
                raise UsageError("--out is required for table-producing modes")
            args.k_list = str(args.k_list)
            args.p_list = str(args.p_list)
            args.rho_grid = str(args.rho_grid)
            return cmd_table(args)
        if args.mode == "optimize":
            if not args.out:
                raise UsageError("--out is required for optimize")
            return cmd_optimize(args)
        return cmd_burke(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleError, UnstableNetworkError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoDataError as exc:
        print(f"no data: {exc}", file=sys.stderr)
        return EXIT_NO_DATA


if __name__ == "__main__":
    sys.exit(main())
