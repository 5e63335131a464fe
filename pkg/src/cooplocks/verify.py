"""Correctness oracles: exclusion counters, liveness probes, handshake model.

Three kinds of checks, all reporting expected-vs-observed verdicts rather
than raising:

* mutual exclusion, made quantitative with a shared counter and an in-CS
  occupancy flag (the holder deliberately context-switches inside the
  critical section now and then, which is exactly the hazard cooperative
  locks must survive);
* deadlock freedom, probed by running the nested-parallelism workload in a
  supervised child process and checking it finishes - including the
  negative control, a pure-spin strategy that is expected to hang;
* the suspend/resume word protocol, exhaustively model-checked over every
  interleaving of the waiter's read and swap with the waker's exchange.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import runtime
from .backoff import BackoffConfig, DEFAULT_BACKOFF, StrategyMask
from .bench import BenchConfig, run_benchmark
from .locks import holding, make_lock
from .runtime import Runtime, RuntimeConfig


@dataclass(frozen=True)
class OracleReport:
    name: str
    expected: object
    observed: object

    @property
    def verdict(self) -> str:
        return "pass" if self.expected == self.observed else "fail"


class BrokenLock:
    """Test double that excludes nobody; the oracles must catch it."""

    def acquire(self):
        runtime.yield_now()

    def release(self):
        pass


def check_mutual_exclusion(lock_name, strategy_code: str, carriers: int,
                           tasks: int, iterations: int,
                           config: BackoffConfig = DEFAULT_BACKOFF,
                           yield_every: int = 64) -> OracleReport:
    """Shared-counter and in-CS-flag oracle for one lock/strategy cell.

    `lock_name` may also be a ready lock object (used for the broken-lock
    sensitivity control). Every `yield_every` iterations the holder yields
    inside the critical section.
    """
    lock = make_lock(lock_name) if isinstance(lock_name, str) else lock_name
    strategy = StrategyMask.parse(strategy_code)
    counter = [0]
    in_cs = [False]
    violations = [0]

    def worker():
        for i in range(iterations):
            with holding(lock, strategy, config):
                if in_cs[0]:
                    violations[0] += 1
                in_cs[0] = True
                counter[0] += 1
                if i % yield_every == 0:
                    runtime.yield_now()
                in_cs[0] = False

    def root():
        workers = [runtime.spawn(worker) for _ in range(tasks)]
        for task in workers:
            runtime.join(task)

    Runtime(RuntimeConfig(carriers=carriers)).start(root)
    label = lock_name if isinstance(lock_name, str) else type(lock_name).__name__
    return OracleReport(
        name=f"mutual-exclusion[{label},{strategy_code},c={carriers},t={tasks},n={iterations}]",
        expected={"counter": tasks * iterations, "overlaps": 0},
        observed={"counter": counter[0], "overlaps": violations[0]},
    )


def check_deadlock_freedom(lock_name: str, strategy_code: str, carriers: int,
                           tasks: int, duration_seconds: float = 0.25,
                           ) -> OracleReport:
    """Run the nested-parallelism workload supervised; pass iff it completes.

    The child is killed after the standard grace budget (5x the nominal
    duration plus warmup and start-up allowances), so a genuinely stuck
    strategy comes back as `deadlock` rather than hanging the caller.
    """
    config = BenchConfig(lock_name=lock_name, strategy_code=strategy_code,
                         scenario="parallel", carriers=carriers, tasks=tasks,
                         duration_seconds=duration_seconds, warmup_seconds=0.0,
                         repetitions=1)
    records = run_benchmark(config)
    return OracleReport(
        name=f"deadlock-freedom[{lock_name},{strategy_code},c={carriers},t={tasks}]",
        expected="ok",
        observed=records[0].status,
    )


# -- handshake interleaving model ---------------------------------------------

def _interleavings(left: tuple, right: tuple):
    """Every interleaving of two event sequences, preserving each order."""
    if not left:
        yield right
        return
    if not right:
        yield left
        return
    for rest in _interleavings(left[1:], right):
        yield (left[0],) + rest
    for rest in _interleavings(left, right[1:]):
        yield (right[0],) + rest


_HANDLE = 7  # any value above KEEP_ACTIVE stands in for a real handle


def _simulate(order: tuple[str, ...]) -> dict:
    """Run one interleaving over an abstract resume word; no real tasks."""
    word = 0  # READY_FOR_SUSPEND
    waiter_read = None
    parked = False
    resumed = False
    for event in order:
        if event == "waiter-read":
            waiter_read = word
        elif event == "waiter-cas":
            # The waiter only swaps if its read saw the ready state; the
            # swap itself re-checks atomically.
            if waiter_read == 0 and word == 0:
                word = _HANDLE
                parked = True
        elif event == "waker-exchange":
            prior = word
            word = 1  # KEEP_ACTIVE
            if prior > 1:
                resumed = True
        else:
            raise AssertionError(event)
    return {"parked": parked, "resumed": resumed,
            "lost_wakeup": parked and not resumed}


def check_handshake_interleavings() -> OracleReport:
    """Exhaustively check the park/wake word protocol for lost wakeups."""
    waiter = ("waiter-read", "waiter-cas")
    waker = ("waker-exchange",)
    lost = 0
    total = 0
    for order in _interleavings(waiter, waker):
        total += 1
        if _simulate(order)["lost_wakeup"]:
            lost += 1
    return OracleReport(
        name=f"handshake-interleavings[{total} orderings]",
        expected={"lost_wakeups": 0},
        observed={"lost_wakeups": lost},
    )


# -- full matrix ---------------------------------------------------------------

#: Strategy codes exercised per lock: every live code whose ladder stays
#: cooperative for that lock. Stages that cannot suspend (TTAS, and the
#: cohort's outer-flag retry) degenerate to pure spinning under S*S, which
#: reintroduces the starvation hazard, so S*S is only exercised where every
#: wait loop can park (plain MCS). The baseline mutex has no strategy knob
#: (its waiting is suspend-by-design), so it runs under a single label.
ME_MATRIX = {
    "TTAS": ["SY*", "*Y*"],
    "MCS": ["SY*", "SYS", "*Y*", "S*S"],
    "TTAS-MCS-1": ["SY*", "SYS", "*Y*"],
    "TTAS-MCS-4": ["SY*", "SYS", "*Y*"],
    "BASELINE": ["SYS"],
}

LIVENESS_MATRIX = {
    "MCS": ["SY*", "SYS", "*Y*", "S*S"],
    "TTAS": ["SY*", "*Y*"],
    "TTAS-MCS-1": ["SY*", "SYS", "*Y*"],
    "TTAS-MCS-4": ["SY*", "SYS", "*Y*"],
    "BASELINE": ["SYS"],
}


@dataclass(frozen=True)
class MatrixRow:
    report: OracleReport
    expected_verdict: str = "pass"

    @property
    def ok(self) -> bool:
        return self.report.verdict == self.expected_verdict


def verification_matrix(carriers: int = 2, tasks: int = 4,
                        iterations: int = 2000,
                        duration_seconds: float = 0.25,
                        progress=None) -> list[MatrixRow]:
    """Run the whole oracle suite; the pure-spin row is expected to fail."""
    rows: list[MatrixRow] = []

    def push(row: MatrixRow):
        rows.append(row)
        if progress is not None:
            progress(row)

    push(MatrixRow(check_handshake_interleavings()))
    for lock_name, codes in ME_MATRIX.items():
        for code in codes:
            push(MatrixRow(check_mutual_exclusion(
                lock_name, code, carriers, tasks, iterations)))
    for lock_name, codes in LIVENESS_MATRIX.items():
        for code in codes:
            push(MatrixRow(check_deadlock_freedom(
                lock_name, code, carriers, tasks, duration_seconds)))
    # Negative control: pure spinning with a context-switching holder must
    # get stuck, demonstrating the hazard the adapted locks remove.
    push(MatrixRow(
        check_deadlock_freedom("MCS", "S**", carriers=1, tasks=2,
                               duration_seconds=duration_seconds),
        expected_verdict="fail",
    ))
    return rows
