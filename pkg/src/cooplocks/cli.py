"""Command-line front end: benchmark runs, task-count sweeps, verification."""

from __future__ import annotations

import argparse
import sys

from .bench import (
    BenchConfig,
    default_task_grid,
    run_benchmark,
    run_sweep,
    write_csv,
)
from .verify import verification_matrix


def _add_bench_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lock", default="MCS",
                        help="TTAS, MCS, TTAS-MCS-<N>, or BASELINE")
    parser.add_argument("--strategy", default="SYS",
                        help="three-letter wait-strategy code, e.g. SYS, SY*, *Y*")
    parser.add_argument("--scenario", default="cache", choices=["cache", "parallel"])
    parser.add_argument("--carriers", type=int, default=2)
    parser.add_argument("--tasks", type=int, default=4)
    parser.add_argument("--duration", type=float, default=2.0, metavar="SECONDS")
    parser.add_argument("--warmup", type=float, default=1.0, metavar="SECONDS")
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--queues", type=int, default=4,
                        help="queue count used when --lock is TTAS-MCS-<N> style")
    parser.add_argument("--yield-limit", type=int, default=8)
    parser.add_argument("--suspend-limit", type=int, default=64)
    parser.add_argument("--spin-limit", type=int, default=1024)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--pool", default="global", choices=["global", "percarrier"])
    parser.add_argument("--out", required=True, metavar="CSV")
    parser.add_argument("--append", action="store_true",
                        help="append to --out instead of overwriting (single header)")


def _config_from(args: argparse.Namespace) -> BenchConfig:
    return BenchConfig(
        lock_name=args.lock,
        strategy_code=args.strategy,
        scenario=args.scenario,
        carriers=args.carriers,
        tasks=args.tasks,
        duration_seconds=args.duration,
        warmup_seconds=args.warmup,
        repetitions=args.reps,
        n_queues=args.queues,
        yield_limit=args.yield_limit,
        suspend_limit=args.suspend_limit,
        spin_limit=args.spin_limit,
        seed=args.seed,
        pool=args.pool,
    )


def _echo_record(record) -> None:
    print(f"  rep {record.rep}: status={record.status} "
          f"acquisitions={record.acquisitions} "
          f"throughput={record.throughput_per_s}/s "
          f"q50={record.lat_ns_q50}ns q99={record.lat_ns_q99}ns")


def _cmd_bench(args: argparse.Namespace) -> int:
    config = _config_from(args)
    print(f"bench {config.lock_name}/{config.strategy_code} "
          f"scenario={config.scenario} carriers={config.carriers} tasks={config.tasks}")
    records = run_benchmark(config, progress=_echo_record)
    write_csv(records, args.out, append=args.append)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _parse_grid(text: str) -> list[int]:
    try:
        grid = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise SystemExit(f"bad --task-grid {text!r}: {exc}")
    if not grid or any(n < 1 for n in grid):
        raise SystemExit(f"bad --task-grid {text!r}: need positive task counts")
    return grid


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _config_from(args)
    grid = _parse_grid(args.task_grid) if args.task_grid else default_task_grid(config.carriers)
    print(f"sweep {config.lock_name}/{config.strategy_code} "
          f"scenario={config.scenario} carriers={config.carriers} tasks={grid}")
    records = run_sweep(config, grid, progress=_echo_record)
    write_csv(records, args.out, append=args.append)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    failures = 0

    def show(row):
        nonlocal failures
        mark = "ok " if row.ok else "BAD"
        note = "" if row.expected_verdict == "pass" else " (expected failure)"
        print(f"[{mark}] {row.report.verdict:4s}{note}  {row.report.name}")
        if not row.ok:
            failures += 1
            print(f"      expected {row.report.expected}, observed {row.report.observed}")

    rows = verification_matrix(
        carriers=args.carriers, tasks=args.tasks,
        iterations=args.iterations, duration_seconds=args.duration,
        progress=show,
    )
    print(f"{len(rows) - failures}/{len(rows)} checks behaved as expected")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cooplocks",
        description="Benchmark and verify locks for cooperatively scheduled tasks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run one benchmark configuration")
    _add_bench_flags(bench)
    bench.set_defaults(func=_cmd_bench)

    sweep = sub.add_parser("sweep", help="run a benchmark across task counts")
    _add_bench_flags(sweep)
    sweep.add_argument("--task-grid", default=None, metavar="N,N,...",
                       help="task counts to sweep (default: powers of two up to 16x carriers)")
    sweep.set_defaults(func=_cmd_sweep)

    verify = sub.add_parser("verify", help="run the correctness oracle matrix")
    verify.add_argument("--carriers", type=int, default=2)
    verify.add_argument("--tasks", type=int, default=4)
    verify.add_argument("--iterations", type=int, default=2000)
    verify.add_argument("--duration", type=float, default=0.25, metavar="SECONDS")
    verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
