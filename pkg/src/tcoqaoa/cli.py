"""Command-line front end: run solvers, generate data, compare results.

Exit codes: 0 on success, 1 for usage errors, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import math
import os
import sys
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines, data, loch, stats
from .ising import QuadraticForm, expand
from .qaoa import QaoaConfig
from .record import RunRecord, TraceEntry
from .standins import write_all

log = logging.getLogger("tcoqaoa")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
WORKERS_ENV = "TCOQAOA_WORKERS"
ALGORITHMS = ("loch", "div", "ga", "rs", "qaoa-direct", "brute")
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def run_seed(base_seed: int, index: int) -> int:
    return (base_seed ^ splitmix64(index)) & _MASK64


@dataclass(frozen=True)
class ExperimentConfig:
    manifest: str
    algorithm: str
    out_dir: Path
    repetitions: int = 10
    sub_sizes: tuple[int, ...] = (7,)
    depths: tuple[int, ...] = (1,)
    pop_sizes: tuple[int, ...] = (10,)
    base_seed: int = 0
    rs_iterations: int = 100
    ga_budget: int = 50_000
    div_runs: int | None = None
    optimizer_budget: int = 100
    shots: int | None = None
    fval_min: float | None = None

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        for name in ("sub_sizes", "depths", "pop_sizes"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")


@dataclass(frozen=True)
class Cell:
    """One (configuration, repetition) unit of work."""

    algorithm: str
    repetition: int
    seed: int
    sub_size: int | None = None
    depth: int | None = None
    pop_size: int | None = None
    options: dict = field(default_factory=dict)


def grid(config: ExperimentConfig) -> list[Cell]:
    algo = config.algorithm
    if algo in ("loch", "div"):
        sweep = [dict(sub_size=N, depth=p) for N, p in itertools.product(config.sub_sizes, config.depths)]
    elif algo == "qaoa-direct":
        sweep = [dict(depth=p) for p in config.depths]
    elif algo == "ga":
        sweep = [dict(pop_size=k) for k in config.pop_sizes]
    else:
        sweep = [{}]
    opts = {"rs_iterations": config.rs_iterations, "ga_budget": config.ga_budget,
            "div_runs": config.div_runs, "optimizer_budget": config.optimizer_budget,
            "shots": config.shots}
    reps = 1 if algo == "brute" else config.repetitions
    return [
        Cell(algo, i, run_seed(config.base_seed, i), options=opts, **params)
        for params in sweep for i in range(reps)
    ]


def run_cell(form: QuadraticForm, cell: Cell) -> RunRecord:
    opts = cell.options
    qaoa = QaoaConfig(depth=cell.depth or 1, optimizer_budget=opts["optimizer_budget"],
                      shots=opts["shots"], seed=cell.seed)
    if cell.algorithm == "loch":
        return loch.solve(form, loch.LochConfig(sub_size=cell.sub_size, qaoa=qaoa, seed=cell.seed))
    if cell.algorithm == "div":
        runs = opts["div_runs"] or math.ceil(form.n / cell.sub_size)
        return baselines.div_qaoa(form, baselines.DivQaoaConfig(cell.sub_size, runs, qaoa, cell.seed))
    if cell.algorithm == "ga":
        return baselines.ga_minimize(form, baselines.GaConfig(
            pop_size=cell.pop_size, eval_budget=opts["ga_budget"], seed=cell.seed))
    if cell.algorithm == "rs":
        return baselines.random_search(form, opts["rs_iterations"], cell.seed)
    if cell.algorithm == "qaoa-direct":
        return baselines.qaoa_direct(form, qaoa)
    return brute_record(form)


def brute_record(form: QuadraticForm) -> RunRecord:
    start = time.perf_counter_ns()
    z, fval = baselines.brute_force(form)
    record = RunRecord("brute", 0, config={"N": form.n})
    record.observe(z, fval)
    record.num_eva = 1 << form.n
    record.wall_time_ns = time.perf_counter_ns() - start
    record.trace.append(TraceEntry(1, fval, record.num_eva, record.wall_time_ns))
    return record


# worker processes load the dataset once instead of receiving the matrix per task
_worker_form: QuadraticForm | None = None


def _init_worker(manifest: str) -> None:
    global _worker_form
    _worker_form = expand(data.load_dataset(manifest))


def _run_in_worker(cell: Cell) -> RunRecord:
    return run_cell(_worker_form, cell)


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, value)


def execute(form: QuadraticForm, manifest: str, cells: list[Cell],
            workers: int) -> tuple[list[tuple[Cell, RunRecord]], list[tuple[Cell, Exception]]]:
    done, failed = [], []
    if workers <= 1:
        for cell in cells:
            try:
                done.append((cell, run_cell(form, cell)))
            except Exception as exc:  # keep going; report at the end
                failed.append((cell, exc))
        return done, failed
    with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(manifest,)) as pool:
        futures = [(cell, pool.submit(_run_in_worker, cell)) for cell in cells]
        for cell, fut in futures:
            try:
                done.append((cell, fut.result()))
            except Exception as exc:
                failed.append((cell, exc))
    return done, failed


def resolve_fval_min(form: QuadraticForm, manifest: data.DatasetManifest,
                     records: list[RunRecord], override: float | None) -> tuple[float, str]:
    """Denominator for ar: exact when the problem is small, else the best value known."""
    if override is not None:
        return override, "user"
    if form.n <= baselines.BRUTE_FORCE_CAP:
        return baselines.brute_force(form)[1], "brute-force"
    candidates = []
    if manifest.best_known_fval is not None:
        candidates.append((float(manifest.best_known_fval), "best-known"))
    # on a tie the first candidate wins, so a matching best-known value is reported as such
    candidates += [(r.best_fval, "batch-min") for r in records]
    if not candidates:
        return math.nan, "none"
    return min(candidates, key=lambda c: c[0])


def _summary_name(dataset: str, cell: Cell) -> str:
    parts = [dataset, cell.algorithm]
    if cell.sub_size is not None:
        parts.append(f"N{cell.sub_size}")
    if cell.depth is not None:
        parts.append(f"p{cell.depth}")
    if cell.pop_size is not None:
        parts.append(f"pop{cell.pop_size}")
    parts.append(f"rep{cell.repetition}")
    return "_".join(parts) + ".json"


def cmd_solve(config: ExperimentConfig) -> int:
    manifest = data.read_manifest(config.manifest)
    form = expand(data.load_dataset(manifest))
    if config.algorithm == "brute" and form.n > baselines.BRUTE_FORCE_CAP:
        raise ValueError(f"brute force is capped at {baselines.BRUTE_FORCE_CAP} variables; "
                         f"{manifest.name} has {form.n}")
    cells = grid(config)
    workers = worker_count()
    log.info("%s: %d runs of %s on %d variables (%d workers)",
             manifest.name, len(cells), config.algorithm, form.n, workers)
    done, failed = execute(form, config.manifest, cells, workers)
    fval_min, source = resolve_fval_min(form, manifest, [r for _, r in done], config.fval_min)

    out = Path(config.out_dir)
    rows = []
    for cell, record in done:
        rows.extend(data.rows_from_record(manifest.name, record, fval_min, source))
        data.write_summary(record, manifest.name, fval_min, source,
                           out / "summaries" / _summary_name(manifest.name, cell))
    data.write_results(rows, out / "results.csv")

    for cell, record in done:
        ar = record.best_fval / fval_min if fval_min > 0 else math.nan
        label = " ".join(f"{k}={v}" for k, v in (("N", cell.sub_size), ("p", cell.depth),
                                                 ("pop", cell.pop_size)) if v is not None)
        print(f"{record.algorithm} {label} rep={cell.repetition} seed={cell.seed} "
              f"fval={record.best_fval:.10g} ar={ar:.6f} numEva={record.num_eva}")
        if config.algorithm == "brute":
            print(f"mask {data.selection_mask(record.best_z)}")
    print(f"fval_min={fval_min:.10g} ({source}); results in {out / 'results.csv'}")
    for cell, exc in failed:
        print(f"error: run {cell.repetition} (seed {cell.seed}) failed: {exc}", file=sys.stderr)
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_brute(args) -> int:
    manifest = data.read_manifest(args.manifest)
    spec = data.load_dataset(manifest)
    z, fval = baselines.brute_force(expand(spec))
    mask = data.selection_mask(z)
    chosen = [spec.ids[i] if spec.ids else str(i) for i, b in enumerate(mask) if b == "1"]
    print(f"mask {mask}")
    print(f"selected {', '.join(chosen) if chosen else '(none)'}")
    print(f"fval {fval:.10g}")
    return EXIT_OK


def cmd_gen(args) -> int:
    out = Path(args.out)
    if args.standins:
        for path in write_all(out):
            print(path)
        return EXIT_OK
    params = data.SyntheticParams(
        eff_low=args.eff_low, eff_high=args.eff_high, eff_zero_fraction=args.eff_zero,
        cost_low=args.cost_low, cost_high=args.cost_high,
    )
    name = args.name or f"synthetic-n{args.n}-s{args.seed}"
    path = data.write_synthetic(out, name, args.n, args.eff, args.cost, params, args.seed,
                                minimize_size=not args.tcs)
    print(path)
    return EXIT_OK


def run_metrics(rows: list[data.ResultRow]) -> list[dict]:
    """Collapse trace rows to one record per run, taken from its last iteration."""
    last: dict[tuple, data.ResultRow] = {}
    for row in rows:
        key = (row.dataset, row.algorithm, row.config, row.seed)
        if key not in last or row.iteration >= last[key].iteration:
            last[key] = row
    return [
        {"dataset": r.dataset, "algorithm": r.algorithm, "config": r.config, "N": r.N,
         "p": r.p, "pop_size": r.pop_size, "seed": r.seed, "fval": r.fval, "ar": r.ar,
         "num_eva": r.num_eva}
        for r in last.values()
    ]


def cmd_stats(args) -> int:
    runs = run_metrics(data.read_results(args.input))
    for flt in args.filter or []:
        key, _, value = flt.partition("=")
        runs = [r for r in runs if str(r.get(key)) == value]
    groups: dict[str, list[float]] = defaultdict(list)
    for r in runs:
        label = "/".join(str(r[k]) for k in args.groupby)
        groups[label].append(float(r[args.metric]))
    if len(groups) < 2:
        raise ValueError(
            f"stats needs at least two groups; grouping by {'/'.join(args.groupby)} "
            f"gave {len(groups)} ({', '.join(groups) or 'none'})"
        )
    report = stats.compare_groups(dict(sorted(groups.items())))
    print(f"metric {args.metric}, grouped by {'/'.join(args.groupby)}")
    for label, vals in sorted(groups.items()):
        print(f"  {label}: n={len(vals)} mean={np.mean(vals):.6g}")
    print(report.format())
    out = Path(args.out) if args.out else Path(args.input).parent
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"stats_{args.metric}_by_{'-'.join(args.groupby)}.json"
    payload = {"metric": args.metric, "groupby": args.groupby, **report.to_dict()}
    path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    print(f"report written to {path}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_solve_args(p: argparse.ArgumentParser, algo_choice: bool) -> None:
    if algo_choice:
        p.add_argument("--algo", choices=ALGORITHMS, default="loch")
    p.add_argument("--manifest", required=True,
                   help="manifest file, or the name of a bundled dataset")
    p.add_argument("--N", dest="sub_sizes", type=int, nargs="+", default=[7],
                   help="sub-problem sizes (loch, div)")
    p.add_argument("--p", dest="depths", type=int, nargs="+", default=[1],
                   help="QAOA depths")
    p.add_argument("--pop-size", dest="pop_sizes", type=int, nargs="+", default=[10])
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--iters", type=int, default=100, help="random search iterations")
    p.add_argument("--budget", type=int, default=50_000, help="GA evaluation budget")
    p.add_argument("--total-runs", type=int, default=None,
                   help="QAOA executions for div (default: ceil(n/N))")
    p.add_argument("--optimizer-budget", type=int, default=100)
    p.add_argument("--shots", type=int, default=None,
                   help="samples per QAOA read-out (default: max(1024, 2^N))")
    p.add_argument("--fval-min", type=float, default=None,
                   help="override the ar denominator")
    p.add_argument("--out", default="results")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tcoqaoa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _add_solve_args(sub.add_parser("solve", help="run a solver over a sweep"), True)
    for algo in ("ga", "rs", "div"):
        p = sub.add_parser(algo, help=f"shorthand for solve --algo {algo}")
        _add_solve_args(p, False)
        p.set_defaults(algo=algo)

    p = sub.add_parser("brute", help="exact minimum of a small dataset")
    p.add_argument("--manifest", required=True)

    p = sub.add_parser("gen", help="write a synthetic dataset or the bundled stand-ins")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eff", type=int, default=1, help="effectiveness groups")
    p.add_argument("--cost", type=int, default=1, help="cost groups")
    p.add_argument("--eff-low", type=float, default=0.0)
    p.add_argument("--eff-high", type=float, default=1.0)
    p.add_argument("--eff-zero", type=float, default=0.0,
                   help="fraction of effectiveness values forced to zero")
    p.add_argument("--cost-low", type=float, default=0.1)
    p.add_argument("--cost-high", type=float, default=100.0)
    p.add_argument("--tcs", action="store_true", help="no suite-size objective")
    p.add_argument("--name", default=None)
    p.add_argument("--standins", action="store_true",
                   help="write all bundled stand-in datasets instead")
    p.add_argument("--out", default="data")

    p = sub.add_parser("stats", help="compare runs from a results CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--groupby", nargs="+", default=["algorithm"],
                   choices=["algorithm", "config", "N", "p", "pop_size", "dataset"])
    p.add_argument("--metric", default="ar", choices=["ar", "fval", "num_eva"])
    p.add_argument("--filter", action="append", metavar="COLUMN=VALUE")
    p.add_argument("--out", default=None, help="directory for the JSON report")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command in ("solve", "ga", "rs", "div"):
            try:
                config = ExperimentConfig(
                    manifest=args.manifest, algorithm=args.algo, out_dir=Path(args.out),
                    repetitions=args.reps, sub_sizes=tuple(args.sub_sizes),
                    depths=tuple(args.depths), pop_sizes=tuple(args.pop_sizes),
                    base_seed=args.seed, rs_iterations=args.iters, ga_budget=args.budget,
                    div_runs=args.total_runs, optimizer_budget=args.optimizer_budget,
                    shots=args.shots, fval_min=args.fval_min,
                )
            except ValueError as exc:
                parser.error(str(exc))
            return cmd_solve(config)
        if args.command == "brute":
            return cmd_brute(args)
        if args.command == "gen":
            return cmd_gen(args)
        return cmd_stats(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
