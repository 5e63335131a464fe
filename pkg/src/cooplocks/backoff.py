"""Escalating wait strategy: spin, then yield, then suspend.

A waiter re-checks its condition between calls to `BackoffPolicy.on_spin_wait`.
Early calls burn a short exponentially growing burst of no-ops; once spinning
has cost more than a context switch would, the policy yields; once yielding
has cost more than parking would, it tries to suspend the task until the
other side wakes it.

Suspension is coordinated through a word shared with the waker: 0 means the
waiter may park, 1 means the waker has already passed by (so parking would
sleep forever), and any larger value is the parked waiter's resume handle.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import runtime

#: Resume-word states. A waiter swaps READY_FOR_SUSPEND for its handle to
#: park; a waker swaps in KEEP_ACTIVE and resumes whatever handle it finds.
READY_FOR_SUSPEND = 0
KEEP_ACTIVE = 1


@dataclass(frozen=True)
class BackoffConfig:
    """Iteration thresholds for the spin/yield/suspend escalation."""

    yield_limit: int = 8
    suspend_limit: int = 64
    spin_limit: int = 1024

    def __post_init__(self):
        if not 0 < self.yield_limit <= self.suspend_limit:
            raise ValueError(
                f"need 0 < yield_limit <= suspend_limit, got "
                f"{self.yield_limit}/{self.suspend_limit}")
        if self.spin_limit < 1:
            raise ValueError(f"spin_limit must be >= 1, got {self.spin_limit}")


DEFAULT_BACKOFF = BackoffConfig()


@dataclass(frozen=True)
class StrategyMask:
    """Which wait stages are enabled, written as a three-letter code.

    Position 1 is spin, position 2 is yield, position 3 is suspend; a `*`
    disables that stage. "SYS" is the full ladder, "SY*" never suspends,
    "S**" spins forever (only useful to demonstrate the deadlock that
    cooperative schedulers suffer under pure spinning).
    """

    spin_enabled: bool = True
    yield_enabled: bool = True
    suspend_enabled: bool = True

    @classmethod
    def parse(cls, code: str) -> "StrategyMask":
        if len(code) != 3:
            raise ValueError(f"strategy code must be 3 characters, got {code!r}")
        letters = code.upper()
        if letters[0] not in "S*" or letters[1] not in "Y*" or letters[2] not in "S*":
            raise ValueError(f"malformed strategy code {code!r} (expected like 'SYS', 'SY*', '*Y*')")
        mask = cls(spin_enabled=letters[0] == "S",
                   yield_enabled=letters[1] == "Y",
                   suspend_enabled=letters[2] == "S")
        if not (mask.spin_enabled or mask.yield_enabled or mask.suspend_enabled):
            raise ValueError("strategy '***' disables every wait stage")
        return mask

    @property
    def code(self) -> str:
        return (("S" if self.spin_enabled else "*")
                + ("Y" if self.yield_enabled else "*")
                + ("S" if self.suspend_enabled else "*"))


FULL_STRATEGY = StrategyMask()


def noop_burst(ops: int) -> None:
    """Run `ops` no-op loop iterations.

    This is the unit of "work" used by both the spin stage and the benchmark
    scenarios: one iteration of an empty `for` loop over a range, constant
    across all locks and strategies.
    """
    for _ in range(ops):
        pass


def try_suspend(node) -> bool:
    """Park the caller on `node` unless its waker has already passed.

    Swaps the node's resume word from READY_FOR_SUSPEND to a fresh handle;
    on success the caller sleeps until `resume_waiter` wakes it (returns
    True). If the word already holds KEEP_ACTIVE the suspension is skipped
    and the caller returns False immediately without parking.
    """
    suspended = False

    def publish(handle: runtime.ResumeHandle):
        nonlocal suspended
        suspended = node.resume_word.compare_and_swap(READY_FOR_SUSPEND, handle)
        return suspended  # False cancels the park

    runtime.suspend_current(publish)
    return suspended


def resume_waiter(node) -> None:
    """Wake whoever parked on `node`, or forbid a pending park.

    Exchanges the resume word with KEEP_ACTIVE; if the prior value was a
    handle the parked task is resumed. If the waiter had not parked yet its
    later swap attempt fails against KEEP_ACTIVE and it keeps running, so
    the wakeup is never lost. Calling this twice is a no-op.
    """
    prior = node.resume_word.exchange(KEEP_ACTIVE)
    if prior > KEEP_ACTIVE:
        runtime.resume(prior)


class BackoffPolicy:
    """Per-wait-loop state machine driving the spin/yield/suspend ladder.

    Create one policy per wait loop, with the node the waiter may park on
    (or node=None when suspension is structurally impossible, e.g. on the
    release side of a queue lock). Disabled stages fall through: a disabled
    spin stage yields instead, a disabled yield stage keeps spinning until
    the suspend threshold.
    """

    __slots__ = ("config", "strategy", "node", "iterations", "trace")

    def __init__(self, config: BackoffConfig = DEFAULT_BACKOFF,
                 strategy: StrategyMask = FULL_STRATEGY,
                 node=None, trace: list | None = None):
        self.config = config
        self.strategy = strategy
        self.node = node
        self.iterations = 0
        self.trace = trace
        if node is None and not (strategy.spin_enabled or strategy.yield_enabled):
            raise ValueError(
                f"strategy {strategy.code!r} without a node leaves no usable wait stage")

    def on_spin_wait(self) -> None:
        """Take exactly one wait action; call once per re-check of the loop."""
        self.iterations += 1
        can_suspend = self.node is not None and self.strategy.suspend_enabled
        if self.iterations < self.config.yield_limit:
            in_spin_stage = True
        elif self.iterations < self.config.suspend_limit or not can_suspend:
            in_spin_stage = False
        else:
            self._suspend()
            return

        if in_spin_stage:
            if self.strategy.spin_enabled:
                self._spin()
            elif self.strategy.yield_enabled:
                self._yield()
            else:
                self._suspend()
        else:
            if self.strategy.yield_enabled:
                self._yield()
            elif self.strategy.spin_enabled:
                self._spin()
            else:
                self._suspend()

    def _spin(self) -> None:
        limit = self.config.spin_limit
        ops = limit if self.iterations >= limit.bit_length() else min(1 << self.iterations, limit)
        if self.trace is not None:
            self.trace.append(("spin", ops))
        noop_burst(ops)

    def _yield(self) -> None:
        if self.trace is not None:
            self.trace.append(("yield",))
        runtime.yield_now()

    def _suspend(self) -> None:
        if self.trace is not None:
            self.trace.append(("suspend-attempt",))
        try_suspend(self.node)
