"""Regenerate the fixtures shared with the plotting package.

The benchmark harness is the reference implementation: quantile expectations
and per-point medians come from its `compute_quantiles`, and the fixture CSV
is written by its own CSV writer so the schema can never drift.

Usage: python3 fixtures/generate.py   (from the frontend/ directory)
"""

import json
import pathlib
import random

from cooplocks.bench import BenchmarkRecord, compute_quantiles, write_csv

HERE = pathlib.Path(__file__).parent
rng = random.Random(442211)


def quantile_cases():
    cases = []
    for _ in range(60):
        n = rng.randint(1, 40)
        samples = [rng.randint(0, 100_000) for _ in range(n)]
        for q in (0.5, 0.95, 0.99):
            cases.append({
                "samples": samples,
                "q": q,
                "expected": compute_quantiles(samples, [q])[0],
            })
    (HERE / "quantile_cases.json").write_text(json.dumps(cases, indent=1))
    print(f"wrote {len(cases)} quantile cases")


def sweep_fixture():
    series = [("MCS", "SYS", 0), ("MCS", "*Y*", 0), ("TTAS-MCS-4", "SYS", 4)]
    task_grid = [1, 2, 4, 8, 16]
    reps = 5
    carriers = 2
    records = []
    for lock, strategy, queues in series:
        for tasks in task_grid:
            for rep in range(reps):
                # One fully deadlocked cell and one partially deadlocked cell.
                dead_cell = strategy == "*Y*" and tasks == 16
                dead_row = lock == "TTAS-MCS-4" and tasks == 8 and rep in (1, 3)
                if dead_cell or dead_row:
                    records.append(BenchmarkRecord(
                        lock=lock, strategy=strategy, scenario="cache",
                        carriers=carriers, tasks=tasks, queues=queues, rep=rep,
                        duration_s=0.0, acquisitions=0, throughput_per_s=0.0,
                        lat_ns_q50=0, lat_ns_q95=0, lat_ns_q99=0,
                        status="deadlock"))
                    continue
                base = 90_000 / (1 + 0.35 * tasks) * (1.25 if strategy == "SYS" else 1.0)
                throughput = round(base * rng.uniform(0.9, 1.1), 3)
                q50 = int(4_000 * (1 + 0.5 * tasks) * rng.uniform(0.85, 1.15))
                q95 = int(q50 * rng.uniform(2.0, 4.0))
                q99 = int(q95 * rng.uniform(1.5, 3.0))
                records.append(BenchmarkRecord(
                    lock=lock, strategy=strategy, scenario="cache",
                    carriers=carriers, tasks=tasks, queues=queues, rep=rep,
                    duration_s=2.0, acquisitions=int(throughput * 2),
                    throughput_per_s=throughput,
                    lat_ns_q50=q50, lat_ns_q95=q95, lat_ns_q99=q99))
    write_csv(records, str(HERE / "sweep_fixture.csv"))
    print(f"wrote {len(records)} fixture records")

    metrics = {
        "throughput": lambda r: r.throughput_per_s,
        "q95_latency": lambda r: r.lat_ns_q95,
        "q99_latency": lambda r: r.lat_ns_q99,
    }
    expected = []
    for lock, strategy, _ in series:
        for tasks in task_grid:
            alive = [r for r in records
                     if r.lock == lock and r.strategy == strategy
                     and r.tasks == tasks and r.status == "ok"]
            for metric, pick in metrics.items():
                if not alive:
                    continue  # fully deadlocked cells have no point at all
                expected.append({
                    "lock": lock, "strategy": strategy, "tasks": tasks,
                    "metric": metric,
                    "median": compute_quantiles([pick(r) for r in alive], [0.5])[0],
                    "reps_used": len(alive),
                })
    (HERE / "expected_medians.json").write_text(json.dumps(expected, indent=1))
    print(f"wrote {len(expected)} expected medians")


if __name__ == "__main__":
    quantile_cases()
    sweep_fixture()
