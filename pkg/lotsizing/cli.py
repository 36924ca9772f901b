"""
Command-line entry point: `lotsizing gen|solve|verify|bench`.

Exit codes: 0 optimal or passed, 2 usage error, 3 time limit, 4 infeasible,
5 verification failure.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bench import load_grid, run_bench, write_bench_csv
from .errors import LotSizingError
from .instance import GeneratorConfig, Instance, generate, load, save
from .methods import Method, run_method
from .solver import CutConfig, SolveReport, SolveStatus
from .verification import DEFAULT_TRIALS, SUITES, run_suite
from storage.backends.sqlite import SQLiteRunStore
from storage.interfaces import solve_run_from_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TIME_LIMIT = 3
EXIT_INFEASIBLE = 4
EXIT_VERIFY_FAILED = 5

_STATUS_EXIT = {
    SolveStatus.OPTIMAL: EXIT_OK,
    SolveStatus.TIME_LIMIT: EXIT_TIME_LIMIT,
    SolveStatus.INFEASIBLE: EXIT_INFEASIBLE,
}


def _default_time_limit() -> float:
    return float(os.getenv("LOTSIZING_TIME_LIMIT", "600"))


def _run_recorder(db_path: Optional[str]):
    """Callback storing each finished run in a SQLite run store, or None."""
    if not db_path:
        return None, None
    store = SQLiteRunStore(db_path)

    def record(inst: Instance, method: Method, cfg: CutConfig, report: SolveReport) -> None:
        run = store.record_run(solve_run_from_report(inst, method.value, cfg.names(), report))
        logger.info("Recorded run %s in %s", run.id, db_path)

    return store, record


def cmd_gen(args: argparse.Namespace) -> int:
    config = GeneratorConfig(h_range=tuple(args.h_range)) if args.h_range else GeneratorConfig()
    inst = generate(args.n, args.m, args.eps, args.seed, config)
    save(inst, args.out)
    print(f"wrote {args.out}: n={inst.n} m={inst.m} epsilon={inst.epsilon} k={inst.k}")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load(args.input)
    cfg = CutConfig.from_names(args.cuts, mixing_limit=args.mixing_limit)
    method = Method(args.method)
    result = run_method(inst, method, cfg, args.time_limit)
    report = result.report
    document = json.dumps(report.to_json_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(document + "\n", encoding="utf-8")
    else:
        print(document)
    if args.cut_log:
        if result.pool is not None:
            result.pool.write_cut_log(args.cut_log)
        else:
            logger.warning("No cut pool for method %s; cut log not written", method.value)
    if args.trace:
        if result.benders is not None:
            result.benders.write_trace(args.trace)
        else:
            logger.warning("Iteration traces are only produced by the benders method")
    store, record = _run_recorder(args.db)
    if record is not None:
        try:
            record(inst, method, cfg, report)
        finally:
            store.close()
    return _STATUS_EXIT[report.status]


def cmd_verify(args: argparse.Namespace) -> int:
    trials = args.trials if args.trials is not None else DEFAULT_TRIALS[args.suite]
    result = run_suite(args.suite, trials, args.seed)
    verdict = "PASS" if result.passed else "FAIL"
    print(f"{result.suite}: {verdict} ({result.checks} checks over {result.trials} trials) {result.detail}".rstrip())
    if result.passed:
        return EXIT_OK
    if result.counterexample is not None:
        print(result.counterexample.model_dump_json())
    return EXIT_VERIFY_FAILED


def cmd_bench(args: argparse.Namespace) -> int:
    grid = load_grid(args.grid)
    store, record = _run_recorder(args.db)
    try:
        rows = run_bench(grid, on_run=record)
    finally:
        if store is not None:
            store.close()
    frame = write_bench_csv(rows, args.out)
    failed = sum(1 for row in rows if row.error)
    print(f"wrote {args.out}: {len(frame)} rows from {len(rows)} runs ({failed} failed)")
    return EXIT_OK


def _range(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("ranges must be nonnegative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lotsizing", description="Branch-and-cut toolkit for chance-constrained static lot-sizing.")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a random instance")
    gen.add_argument("--n", type=int, required=True, help="number of periods")
    gen.add_argument("--m", type=int, required=True, help="number of scenarios")
    gen.add_argument("--eps", type=float, required=True, help="risk level in [0, 1)")
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", required=True, help="instance JSON path")
    gen.add_argument("--h-range", type=_range, nargs=2, metavar=("LO", "HI"), help="holding cost range (default 30 60)")
    gen.set_defaults(handler=cmd_gen)

    solve = commands.add_parser("solve", help="solve an instance")
    solve.add_argument("--in", dest="input", required=True, help="instance JSON path")
    solve.add_argument("--method", choices=[method.value for method in Method], default=Method.COMPACT.value)
    solve.add_argument("--cuts", default="mixing", help="comma separated subset of mixing,new,stock,ls (empty for none)")
    solve.add_argument("--mixing-limit", type=int, default=150)
    solve.add_argument("--time-limit", type=float, default=_default_time_limit())
    solve.add_argument("--out", help="report JSON path (stdout when omitted)")
    solve.add_argument("--cut-log", help="cut log CSV path")
    solve.add_argument("--trace", help="Benders iteration trace CSV path")
    solve.add_argument("--db", help="SQLite file to record the run in")
    solve.set_defaults(handler=cmd_solve)

    verify = commands.add_parser("verify", help="run an oracle property suite")
    verify.add_argument("--suite", choices=list(SUITES), required=True)
    verify.add_argument("--trials", type=int, default=None)
    verify.add_argument("--seed", type=int, default=0)
    verify.set_defaults(handler=cmd_verify)

    bench = commands.add_parser("bench", help="run a benchmark grid")
    bench.add_argument("--grid", required=True, help="grid JSON path")
    bench.add_argument("--out", required=True, help="CSV path")
    bench.add_argument("--db", help="SQLite file to record every run in")
    bench.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        format="%(levelname)s:     %(asctime)s - %(message)s",
        level=os.getenv("LOTSIZING_LOG_LEVEL", "INFO").upper(),
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (LotSizingError, ValueError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
