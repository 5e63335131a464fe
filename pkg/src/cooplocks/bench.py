"""Benchmark harness: timed lock/unlock loops over two workloads.

Every task runs the classic measurement loop - take a timestamp, acquire,
take a timestamp, run the critical section, release, run the parallel
section - until its time window closes. Workers are aligned by a barrier
before and after the timed window, acquisition counts are kept per task and
summed afterwards, and lock latencies (the two timestamps' difference) are
reduced to quantiles.

Repetitions execute in a child process each: a run that deadlocks (which
pure-spin strategies genuinely do under cooperative scheduling) is killed
and recorded with a `deadlock` status instead of taking the caller down.
"""

from __future__ import annotations

import csv
import ctypes
import dataclasses
import json
import math
import os
import subprocess
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from . import runtime
from .backoff import BackoffConfig, StrategyMask, noop_burst
from .barrier import CoopBarrier
from .locks import CohortLock, LockNode, McsLock, TtasLock, make_lock
from .runtime import PoolPolicy, Runtime, RuntimeConfig

CACHE_LINE_BYTES = 64

#: Workload constants: the cache-line scenario's parallel section runs 100
#: blocks of 1000 no-ops with a yield after each block; the parallelizable
#: scenario's critical section fans out to 12 subtasks of 10,000 no-ops and
#: its parallel section runs 10 blocks of 1000 no-ops.
CACHE_PARALLEL_BLOCKS = 100
PARALLEL_CS_TASKS = 12
PARALLEL_CS_OPS = 10_000
PARALLEL_PARALLEL_BLOCKS = 10
BLOCK_OPS = 1000


class SharedData:
    """Two four-integer records on two distinct cache lines.

    Backed by one ctypes buffer with the records placed at consecutive
    64-byte-aligned offsets, so the alignment claim is real and testable.
    """

    def __init__(self):
        raw = (ctypes.c_uint64 * (3 * CACHE_LINE_BYTES // 8))()
        base = ctypes.addressof(raw)
        offset = (-base) % CACHE_LINE_BYTES
        self._raw = raw  # keepalive for the views below
        self.first = (ctypes.c_uint64 * 4).from_address(base + offset)
        self.second = (ctypes.c_uint64 * 4).from_address(base + offset + CACHE_LINE_BYTES)

    def increment_all(self) -> None:
        for i in range(4):
            self.first[i] += 1
        for i in range(4):
            self.second[i] += 1

    def field_values(self) -> list[int]:
        return list(self.first) + list(self.second)

    def line_addresses(self) -> tuple[int, int]:
        return (ctypes.addressof(self.first), ctypes.addressof(self.second))


def cs_cache_line_increment(data: SharedData,
                            switch: Callable[[], None] = runtime.yield_now) -> None:
    """Increment all eight shared integers, then context-switch before exit."""
    data.increment_all()
    switch()


def parallel_cache_line_scenario(burst: Callable[[int], None] = noop_burst,
                                 switch: Callable[[], None] = runtime.yield_now) -> None:
    """100 blocks of 1000 no-ops, yielding after each block."""
    for _ in range(CACHE_PARALLEL_BLOCKS):
        burst(BLOCK_OPS)
        switch()


def cs_parallelizable(data: SharedData | None = None,
                      burst: Callable[[int], None] = noop_burst) -> None:
    """Fan out to 12 subtasks of 10,000 no-ops and join them all while holding."""
    children = [runtime.spawn(lambda: burst(PARALLEL_CS_OPS))
                for _ in range(PARALLEL_CS_TASKS)]
    for child in children:
        runtime.join(child)


def parallel_parallelizable_scenario(burst: Callable[[int], None] = noop_burst,
                                     switch: Callable[[], None] = runtime.yield_now) -> None:
    """10 blocks of 1000 no-ops, yielding after each block."""
    for _ in range(PARALLEL_PARALLEL_BLOCKS):
        burst(BLOCK_OPS)
        switch()


@dataclass(frozen=True)
class Scenario:
    name: str
    critical_section: Callable[[SharedData], None]
    parallel_work: Callable[[], None]


SCENARIOS = {
    "cache": Scenario("cache", cs_cache_line_increment, parallel_cache_line_scenario),
    "parallel": Scenario("parallel", cs_parallelizable, parallel_parallelizable_scenario),
}


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark cell: lock, strategy, workload, and sizing."""

    lock_name: str = "MCS"
    strategy_code: str = "SYS"
    scenario: str = "cache"
    carriers: int = 2
    tasks: int = 4
    duration_seconds: float = 2.0
    warmup_seconds: float = 1.0
    repetitions: int = 5
    n_queues: int = 4
    yield_limit: int = 8
    suspend_limit: int = 64
    spin_limit: int = 1024
    seed: int = 0
    pool: str = "global"

    def __post_init__(self):
        if self.tasks < 1:
            raise ValueError(f"tasks must be >= 1, got {self.tasks}")
        if self.duration_seconds <= 0:
            raise ValueError("duration must be positive")
        if self.warmup_seconds < 0:
            raise ValueError("warmup must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r} "
                             f"(expected one of {sorted(SCENARIOS)})")
        if self.pool not in ("global", "percarrier"):
            raise ValueError(f"unknown pool policy {self.pool!r}")
        if self.n_queues < 1:
            raise ValueError("n_queues must be >= 1")
        make_lock(self.resolved_lock_name)  # validates the name
        StrategyMask.parse(self.strategy_code)

    @property
    def resolved_lock_name(self) -> str:
        """Lock name with the cohort queue count made explicit.

        "TTAS-MCS" picks up `n_queues`; "TTAS-MCS-<N>" keeps its own count.
        """
        name = self.lock_name.upper()
        if name == "TTAS-MCS":
            return f"TTAS-MCS-{self.n_queues}"
        return name

    @property
    def queue_count(self) -> int:
        name = self.resolved_lock_name
        if name.startswith("TTAS-MCS-"):
            return int(name[len("TTAS-MCS-"):])
        return 0

    def backoff(self) -> BackoffConfig:
        return BackoffConfig(yield_limit=self.yield_limit,
                             suspend_limit=self.suspend_limit,
                             spin_limit=self.spin_limit)

    def runtime_config(self, rep: int = 0) -> RuntimeConfig:
        policy = (PoolPolicy.GLOBAL_FIFO if self.pool == "global"
                  else PoolPolicy.PER_CARRIER_FIFO)
        return RuntimeConfig(carriers=self.carriers, pool_policy=policy,
                             seed=self.seed + rep)

    def build_lock(self):
        return make_lock(self.resolved_lock_name)


@dataclass
class BenchmarkRecord:
    """One repetition's outcome, one CSV row."""

    lock: str
    strategy: str
    scenario: str
    carriers: int
    tasks: int
    queues: int
    rep: int
    duration_s: float
    acquisitions: int
    throughput_per_s: float
    lat_ns_q50: int
    lat_ns_q95: int
    lat_ns_q99: int
    status: str = "ok"

    def to_row(self) -> list:
        return [getattr(self, field) for field in CSV_COLUMNS]


CSV_COLUMNS = [f.name for f in dataclasses.fields(BenchmarkRecord)]


def compute_quantiles(samples: Sequence[float], qs: Sequence[float]) -> list:
    """Nearest-rank quantiles over the sorted samples."""
    if not samples:
        raise ValueError("cannot take quantiles of an empty sample set")
    for q in qs:
        if not 0 < q <= 1:
            raise ValueError(f"quantile fractions must be in (0, 1], got {q}")
    ordered = sorted(samples)
    n = len(ordered)
    return [ordered[max(1, math.ceil(q * n)) - 1] for q in qs]


class _Worker:
    """Per-task measurement state: the loop body plus its sample buffers."""

    def __init__(self, config: BenchConfig, lock, strategy, backoff,
                 scenario: Scenario, data: SharedData):
        self.config = config
        self.lock = lock
        self.strategy = strategy
        self.backoff = backoff
        self.scenario = scenario
        self.data = data
        self.samples: list[int] = []
        self.warmup_acquisitions = 0

    def _one_pass(self, deadline_ns: int, record: bool) -> int:
        lock = self.lock
        strategy = self.strategy
        backoff = self.backoff
        cs = self.scenario.critical_section
        parallel = self.scenario.parallel_work
        data = self.data
        samples = self.samples
        clock = time.perf_counter_ns
        count = 0
        if isinstance(lock, (McsLock, CohortLock)):
            while clock() < deadline_ns:
                node = LockNode()
                before = clock()
                lock.acquire(node, strategy, backoff)
                after = clock()
                if record:
                    samples.append(after - before)
                cs(data)
                lock.release(node, strategy, backoff)
                parallel()
                count += 1
        elif isinstance(lock, TtasLock):
            while clock() < deadline_ns:
                before = clock()
                lock.acquire(strategy, backoff)
                after = clock()
                if record:
                    samples.append(after - before)
                cs(data)
                lock.release()
                parallel()
                count += 1
        else:
            while clock() < deadline_ns:
                before = clock()
                lock.acquire()
                after = clock()
                if record:
                    samples.append(after - before)
                cs(data)
                lock.release()
                parallel()
                count += 1
        return count

    def run(self, open_barrier, start_barrier, close_barrier) -> None:
        config = self.config
        open_barrier.wait()
        if config.warmup_seconds:
            warm_deadline = time.perf_counter_ns() + int(config.warmup_seconds * 1e9)
            self.warmup_acquisitions = self._one_pass(warm_deadline, record=False)
        start_barrier.wait()
        deadline = time.perf_counter_ns() + int(config.duration_seconds * 1e9)
        self._one_pass(deadline, record=True)
        close_barrier.wait()


@dataclass
class RunProbe:
    """Extra observables from an in-process repetition, for oracle checks."""

    shared_field_values: list[int]
    warmup_acquisitions: int
    timed_acquisitions: int


def run_repetition(config: BenchConfig, rep: int = 0) -> tuple[BenchmarkRecord, RunProbe]:
    """Run one repetition in the current process and build its record.

    Deadlock-prone configurations will hang here; use `run_benchmark` for
    the supervised version.
    """
    lock = config.build_lock()
    strategy = StrategyMask.parse(config.strategy_code)
    backoff = config.backoff()
    scenario = SCENARIOS[config.scenario]
    data = SharedData()
    workers = [_Worker(config, lock, strategy, backoff, scenario, data)
               for _ in range(config.tasks)]
    open_barrier = CoopBarrier(config.tasks + 1)
    start_barrier = CoopBarrier(config.tasks + 1)
    close_barrier = CoopBarrier(config.tasks + 1)
    wall = {}

    def coordinator():
        tasks = [runtime.spawn(lambda w=w: w.run(open_barrier, start_barrier, close_barrier))
                 for w in workers]
        open_barrier.wait()
        start_barrier.wait()
        wall["start"] = time.perf_counter_ns()
        close_barrier.wait()
        wall["end"] = time.perf_counter_ns()
        for task in tasks:
            runtime.join(task)

    Runtime(config.runtime_config(rep)).start(coordinator)

    counts = [len(w.samples) for w in workers]
    acquisitions = sum(counts)
    all_samples = [s for w in workers for s in w.samples]
    measured_s = (wall["end"] - wall["start"]) / 1e9
    if config.scenario == "cache":
        expected = acquisitions + sum(w.warmup_acquisitions for w in workers)
        values = data.field_values()
        if values != [expected] * 8:
            raise RuntimeError(
                f"mutual exclusion violated: shared fields {values}, expected {expected}")
    if all_samples:
        q50, q95, q99 = compute_quantiles(all_samples, [0.50, 0.95, 0.99])
    else:
        q50 = q95 = q99 = 0
    record = BenchmarkRecord(
        lock=config.resolved_lock_name,
        strategy=config.strategy_code.upper(),
        scenario=config.scenario,
        carriers=config.carriers,
        tasks=config.tasks,
        queues=config.queue_count,
        rep=rep,
        duration_s=round(measured_s, 6),
        acquisitions=acquisitions,
        throughput_per_s=round(acquisitions / measured_s, 3) if measured_s > 0 else 0.0,
        lat_ns_q50=q50,
        lat_ns_q95=q95,
        lat_ns_q99=q99,
    )
    probe = RunProbe(
        shared_field_values=data.field_values() if config.scenario == "cache" else [],
        warmup_acquisitions=sum(w.warmup_acquisitions for w in workers),
        timed_acquisitions=acquisitions,
    )
    return record, probe


def _deadlocked_record(config: BenchConfig, rep: int) -> BenchmarkRecord:
    return BenchmarkRecord(
        lock=config.resolved_lock_name,
        strategy=config.strategy_code.upper(),
        scenario=config.scenario,
        carriers=config.carriers,
        tasks=config.tasks,
        queues=config.queue_count,
        rep=rep,
        duration_s=0.0,
        acquisitions=0,
        throughput_per_s=0.0,
        lat_ns_q50=0,
        lat_ns_q95=0,
        lat_ns_q99=0,
        status="deadlock",
    )


def grace_timeout(config: BenchConfig) -> float:
    """Per-repetition supervision budget: warmup + duration + 5x duration grace,
    plus a fixed allowance for interpreter start-up and barrier skew."""
    return 5.0 + config.warmup_seconds + 6.0 * config.duration_seconds


def run_benchmark(config: BenchConfig,
                  progress: Callable[[BenchmarkRecord], None] | None = None,
                  ) -> list[BenchmarkRecord]:
    """Run every repetition of `config` in supervised child processes.

    A repetition that does not finish within `grace_timeout` is killed and
    recorded with status `deadlock`; the suite continues.
    """
    records = []
    for rep in range(config.repetitions):
        payload = json.dumps({"config": dataclasses.asdict(config), "rep": rep})
        try:
            proc = subprocess.run(
                [sys.executable, "-m", "cooplocks._childproc"],
                input=payload, capture_output=True, text=True,
                timeout=grace_timeout(config),
            )
        except subprocess.TimeoutExpired:
            record = _deadlocked_record(config, rep)
        else:
            if proc.returncode != 0:
                raise RuntimeError(
                    f"benchmark child failed (rep {rep}):\n{proc.stderr.strip()}")
            record = BenchmarkRecord(**json.loads(proc.stdout))
        records.append(record)
        if progress is not None:
            progress(record)
    return records


def default_task_grid(carriers: int) -> list[int]:
    """Powers of two from 1 up to 16x the carrier count."""
    grid = []
    tasks = 1
    while tasks <= 16 * carriers:
        grid.append(tasks)
        tasks *= 2
    return grid


def run_sweep(base: BenchConfig, task_grid: Sequence[int] | None = None,
              progress: Callable[[BenchmarkRecord], None] | None = None,
              ) -> list[BenchmarkRecord]:
    """Run `base` at each task count of the grid, collecting all records."""
    grid = list(task_grid) if task_grid is not None else default_task_grid(base.carriers)
    records = []
    for tasks in grid:
        config = dataclasses.replace(base, tasks=tasks)
        records.extend(run_benchmark(config, progress=progress))
    return records


def write_csv(records: Sequence[BenchmarkRecord], path: str, append: bool = False) -> None:
    """Write records as CSV; the header is emitted once per file."""
    fresh = not append or not os.path.exists(path) or os.path.getsize(path) == 0
    mode = "a" if append else "w"
    with open(path, mode, newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(record.to_row())


def read_records(path: str) -> list[BenchmarkRecord]:
    """Parse a CSV produced by `write_csv` back into records."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames} in {path}")
        records = []
        for row in reader:
            records.append(BenchmarkRecord(
                lock=row["lock"],
                strategy=row["strategy"],
                scenario=row["scenario"],
                carriers=int(row["carriers"]),
                tasks=int(row["tasks"]),
                queues=int(row["queues"]),
                rep=int(row["rep"]),
                duration_s=float(row["duration_s"]),
                acquisitions=int(row["acquisitions"]),
                throughput_per_s=float(row["throughput_per_s"]),
                lat_ns_q50=int(row["lat_ns_q50"]),
                lat_ns_q95=int(row["lat_ns_q95"]),
                lat_ns_q99=int(row["lat_ns_q99"]),
                status=row["status"],
            ))
        return records
