"""Command-line drivers: ``solve``, ``simulate``, ``compare`` and ``sweep``.

Each command computes everything first and then writes one CSV file, so
output is byte-identical for a fixed configuration and seed. Summary
statistics go to standard output as ``label: value`` lines.

Exit codes: 0 success, 1 invalid input, 2 runtime or numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import config as cfgmod
from . import kernels, rng
from .config import ExperimentConfig
from .dp import solve_bellman
from .policies import cec_price, make_policy
from .sim import paired_compare, simulate
from .stats import histogram, quantile, summarise

POLICIES = ("bellman", "cec", "olfc")

# (C, gamma, q1, q2) rows of the published comparison tables
TABLE_ROWS = (
    (0.25, 0.05, 2.0, 4.0),
    (0.25, 0.1, 1.33, 2.67),
    (0.5, 0.05, 2.67, 4.0),
    (0.5, 0.1, 2.0, 2.67),
    (1.0, 0.05, 1.33, 4.0),
    (1.0, 0.1, 2.67, 2.67),
)
FIG5_PAIRS = ((0.5, 0.05), (0.5, 0.1), (1.0, 0.05), (1.0, 0.1))
FIG5_Q1 = tuple(k / 3 for k in range(3, 10))   # 1.0 .. 3.0
FIG5_Q2 = tuple(k / 3 for k in range(6, 16))   # 2.0 .. 5.0

SWEEP_HEADER = ["C", "gamma", "q1", "q2", "relL2", "q05", "median", "q95", "fracBetter", "error"]


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- formatting ----------------------------------------------------------------

def fmt(x) -> str:
    """Shortest round-trip text for a number; refuses NaN and infinities."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise FloatingPointError("non-finite value in output")
    return repr(x + 0.0)  # folds -0.0 into 0.0


def write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, str) else fmt(c) for c in row])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def emit(label: str, value) -> None:
    text = value if isinstance(value, str) else fmt(value)
    print(f"{label}: {text}")


def emit_histogram(label: str, xs, bins: int) -> None:
    edges, counts = histogram(xs, bins)
    for lo, hi, c in zip(edges[:-1], edges[1:], counts):
        print(f"{label}: {fmt(lo)} {fmt(hi)} {int(c)}")


# -- library orchestration -----------------------------------------------------

def build_policy(name: str, cfg: ExperimentConfig, table=None):
    p = cfg.problem()
    if name == "bellman" and table is None:
        table = solve_bellman(p, cfg.solver_config())
    return make_policy(name, p, table, cfg.olfc_config()), table


def compare_samples(cfg: ExperimentConfig, name_a: str, name_b: str):
    pol_a, table = build_policy(name_a, cfg)
    pol_b = pol_a if name_b == name_a else build_policy(name_b, cfg, table)[0]
    return paired_compare(cfg.problem(), pol_a, pol_b, cfg.n_sim, cfg.seed)


def sweep_cell(cfg: ExperimentConfig, name_a: str, name_b: str, index: int,
               cell: tuple[float, float, float, float]) -> list:
    """One sweep row; failures are reported in the ``error`` column."""
    C, gamma, q1, q2 = cell
    seed = rng.derive_seed(cfg.seed, rng.SWEEP_CELL, index)
    try:
        cell_cfg = cfg.replace(C=C, gamma=gamma, q1=q1, q2=q2, seed=seed)
        st = summarise(compare_samples(cell_cfg, name_a, name_b))
        values = [st.rel_l2, st.q05, st.median, st.q95, st.frac_b_better]
        for v in values:
            fmt(v)
        return [C, gamma, q1, q2, *values, ""]
    except Exception as exc:  # noqa: BLE001 - a bad cell must not stop the sweep
        msg = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        return [C, gamma, q1, q2, "", "", "", "", "", msg]


def sweep_cells(args) -> list[tuple[float, float, float, float]]:
    if args.preset == "table1":
        return list(TABLE_ROWS)
    if args.preset == "fig5":
        return [(C, g, q1, q2) for C, g in FIG5_PAIRS for q2 in FIG5_Q2 for q1 in FIG5_Q1]
    if args.points:
        cells = [tuple(_floats(p, 4, "--points entry")) for p in args.points.split(";") if p.strip()]
    else:
        pairs = ([tuple(_floats(p, 2, "--pairs entry", sep=":")) for p in args.pairs.split(",")]
                 if args.pairs else [(None, None)])
        q1s = _floats(args.q1_values, None, "--q1-values") if args.q1_values else [None]
        q2s = _floats(args.q2_values, None, "--q2-values") if args.q2_values else [None]
        cells = [(C, g, a, b) for C, g in pairs for b in q2s for a in q1s]
    if not cells:
        raise UsageError("sweep needs at least one parameter combination")
    return cells


def _floats(text: str, n: int | None, what: str, sep: str = ",") -> list[float]:
    try:
        out = [float(x) for x in text.split(sep) if x.strip()]
    except ValueError:
        raise UsageError(f"bad {what}: {text!r}") from None
    if not out or (n is not None and len(out) != n):
        raise UsageError(f"bad {what}: {text!r}")
    return out


# -- commands -----------------------------------------------------------------

def cmd_solve(cfg: ExperimentConfig, out: str) -> None:
    p = cfg.problem()
    table = solve_bellman(p, cfg.solver_config())
    T, s = p.T, table.grid
    header = (["s"] + [f"v_t{t}" for t in range(T + 1)] + [f"aB_t{t}" for t in range(T)]
              + [f"aC_t{t}" for t in range(T)])
    cec = np.column_stack([cec_price(p, t, s) for t in range(T)])
    rows = np.column_stack([s, table.values, table.policy, cec])
    write_csv(out, header, rows)
    emit("grid_points", len(s))
    emit("value_t0_s1", float(table.values[-1, 0]))
    emit("price_t0_s1", float(table.policy[-1, 0]))


def cmd_simulate(cfg: ExperimentConfig, policy: str, out: str) -> None:
    p = cfg.problem()
    pol, _ = build_policy(policy, cfg)
    batch = simulate(p, pol, cfg.n_sim, cfg.seed)
    header = ["path_id"] + [f"a_t{t}" for t in range(p.T)] + ["profit"]
    rows = [[k, *batch.prices[k], batch.profits[k]] for k in range(cfg.n_sim)]
    write_csv(out, header, rows)
    profits = batch.profits
    emit("policy", policy)
    emit("n", cfg.n_sim)
    emit("mean_profit", float(profits.mean()))
    emit("std_profit", float(profits.std(ddof=1)) if profits.size > 1 else 0.0)
    for lvl, name in ((0.05, "q05"), (0.5, "median"), (0.95, "q95")):
        emit(f"{name}_profit", quantile(profits, lvl))
    for t in range(p.T):
        col = batch.prices[:, t]
        qs = " ".join(fmt(quantile(col, lvl)) for lvl in (0.0, 0.25, 0.5, 0.75, 1.0))
        emit(f"price_t{t}_min_q25_median_q75_max", qs)
    emit_histogram("profit_hist", profits, 40)


def cmd_compare(cfg: ExperimentConfig, name_a: str, name_b: str, out: str) -> None:
    samples = compare_samples(cfg, name_a, name_b)
    a, b = samples.profits_a, samples.profits_b
    rows = [[k, a[k], b[k], a[k] - b[k]] for k in range(samples.n)]
    write_csv(out, ["path_id", "profit_A", "profit_B", "diff"], rows)
    st = summarise(samples)
    emit("policy_a", name_a)
    emit("policy_b", name_b)
    emit("n", st.n)
    emit("n_excluded", st.n_excluded)
    emit("mean_profit_a", float(a.mean()))
    emit("mean_profit_b", float(b.mean()))
    emit("mean_diff", st.mean_diff)
    emit("q05", st.q05)
    emit("median", st.median)
    emit("q95", st.q95)
    emit("rel_l2", st.rel_l2)
    emit("frac_a_better", st.frac_a_better)
    emit("frac_b_better", st.frac_b_better)
    emit_histogram("profit_a_hist", a, 40)
    emit_histogram("profit_b_hist", b, 40)
    emit_histogram("diff_hist", a - b, 30)


def cmd_sweep(cfg: ExperimentConfig, name_a: str, name_b: str,
              cells: list, out: str, jobs: int) -> None:
    cells = [(cfg.C if C is None else C, cfg.gamma if g is None else g,
              cfg.q1 if a is None else a, cfg.q2 if b is None else b) for C, g, a, b in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futures = [ex.submit(sweep_cell, cfg, name_a, name_b, i, c) for i, c in enumerate(cells)]
            rows = [f.result() for f in futures]
    else:
        rows = [sweep_cell(cfg, name_a, name_b, i, c) for i, c in enumerate(cells)]
    write_csv(out, SWEEP_HEADER, rows)
    emit("cells", len(rows))
    emit("failed_cells", sum(1 for r in rows if r[-1]))


# -- argument handling -------------------------------------------------------

OVERRIDES = {
    # flag: (config key, type)
    "--seed": ("seed", int), "--nsim": ("n_sim", int), "--nexp": ("n_exp", int),
    "--T": ("T", int), "--C": ("C", float), "--gamma": ("gamma", float),
    "--q1": ("q1", float), "--q2": ("q2", float), "--K": ("K", int), "--M": ("M", int),
    "--nsaa": ("n_saa", int), "--a-min": ("a_min", float), "--a-max": ("a_max", float),
    "--refine-iters": ("refine_iters", int), "--multistart": ("multistart", int),
    "--tol": ("tol", float), "--max-iters": ("max_iters", int),
    "--disturbance": ("disturbance", str), "--w": ("w", float),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output CSV path (default: <command>.csv)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for the compiled kernels")
    for flag, (key, typ) in OVERRIDES.items():
        common.add_argument(flag, dest=key, type=typ, default=None)

    parser = _Parser(prog="dynprice", description="Stochastic dynamic pricing experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="value and policy table on the stock grid")

    sim = sub.add_parser("simulate", parents=[common], help="simulate one policy from S0 = 1")
    sim.add_argument("--policy", "--policy-a", dest="policy_a", choices=POLICIES, default="bellman")

    cmp_ = sub.add_parser("compare", parents=[common], help="paired comparison of two policies")
    cmp_.add_argument("--policy-a", choices=POLICIES, default="bellman")
    cmp_.add_argument("--policy-b", choices=POLICIES, default="cec")

    sw = sub.add_parser("sweep", parents=[common], help="paired comparisons over parameter cells")
    sw.add_argument("--policy-a", choices=POLICIES, default="bellman")
    sw.add_argument("--policy-b", choices=POLICIES, default="cec")
    sw.add_argument("--preset", choices=("table1", "fig5"))
    sw.add_argument("--points", help="explicit cells 'C,gamma,q1,q2;C,gamma,q1,q2;...'")
    sw.add_argument("--pairs", help="(C, gamma) pairs 'C:gamma,C:gamma,...'")
    sw.add_argument("--q1-values", help="comma-separated q1 grid")
    sw.add_argument("--q2-values", help="comma-separated q2 grid")
    sw.add_argument("--jobs", type=int, default=1, help="worker processes across cells")
    return parser


def config_from_args(args) -> ExperimentConfig:
    base = cfgmod.load(args.config) if args.config else ExperimentConfig()
    changes = {key: getattr(args, key) for key, _ in OVERRIDES.values()
               if getattr(args, key) is not None}
    if args.out is not None:
        changes["out"] = args.out
    return base.replace(**changes) if changes else base


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        out = cfg.out or f"{args.command}.csv"
        if args.threads is not None:
            if args.threads < 1:
                raise UsageError("--threads must be >= 1")
            kernels.set_threads(args.threads)
        if args.command == "sweep":
            if args.jobs < 1:
                raise UsageError("--jobs must be >= 1")
            cells = sweep_cells(args)
    except (ValueError, OSError) as exc:
        print(f"dynprice: error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "solve":
            cmd_solve(cfg, out)
        elif args.command == "simulate":
            cmd_simulate(cfg, args.policy_a, out)
        elif args.command == "compare":
            cmd_compare(cfg, args.policy_a, args.policy_b, out)
        else:
            cmd_sweep(cfg, args.policy_a, args.policy_b, cells, out, args.jobs)
    except ValueError as exc:
        print(f"dynprice: error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, RuntimeError, OSError) as exc:
        print(f"dynprice: runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
