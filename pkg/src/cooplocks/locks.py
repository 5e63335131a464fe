"""Locks adapted for cooperatively scheduled tasks.

All waiting goes through the spin/yield/suspend backoff ladder, so a waiter
never monopolizes its carrier: the holder of a contended lock can always be
scheduled again, even when it context-switches inside the critical section.

Four locks are provided:

* `TtasLock` - an atomic flag with read-spin and swap attempts (no suspension).
* `McsLock` - a FIFO queue lock; each waiter parks on its own node.
* `CohortLock` - N queue locks whose heads compete for one shared flag.
* `BaselineMutex` - the flag-plus-waitlist shape most task libraries ship,
  suspending immediately on contention; included as a comparison point.

None of the locks are reentrant, and none block the carrier's OS thread.
"""

from __future__ import annotations

import contextlib
import threading

from . import runtime
from .atomics import AtomicCell
from .backoff import (
    DEFAULT_BACKOFF,
    FULL_STRATEGY,
    READY_FOR_SUSPEND,
    BackoffConfig,
    BackoffPolicy,
    StrategyMask,
    resume_waiter,
)


class LockNode:
    """Per-acquisition queue node.

    `locked` is the flag the owner clears to pass the lock on; `next` links
    to the successor once it has enqueued itself; `resume_word` carries the
    suspend/resume handshake. A node belongs to one acquisition cycle: call
    `reset()` (or build a fresh node) before reusing it.
    """

    __slots__ = ("locked", "next", "resume_word", "queue_index", "_held")

    def __init__(self):
        self.reset()

    def reset(self) -> None:
        self.locked = False
        self.next: LockNode | None = None
        # A fresh cell per cycle: a straggling waker from the previous
        # cycle then touches a dead object instead of the new handshake.
        self.resume_word = AtomicCell(READY_FOR_SUSPEND)
        self.queue_index: int | None = None
        self._held = False


class TtasLock:
    """Flag lock: read-spin until the flag looks free, then try to swap it."""

    __slots__ = ("_flag",)

    def __init__(self):
        self._flag = AtomicCell(False)

    def try_acquire(self) -> bool:
        return self._flag.compare_and_swap(False, True)

    def acquire(self, strategy: StrategyMask = FULL_STRATEGY,
                config: BackoffConfig = DEFAULT_BACKOFF) -> None:
        if self.try_acquire():
            return
        policy = BackoffPolicy(config, strategy, node=None)
        while True:
            policy.on_spin_wait()
            if not self._flag.get():
                if self.try_acquire():
                    return

    def release(self) -> None:
        prior = self._flag.exchange(False)
        assert prior, "release of a TtasLock that is not held"

    def locked(self) -> bool:
        return self._flag.get()


class McsLock:
    """FIFO queue lock; waiters park on their own node's flag.

    The waiter side uses the full ladder including suspension. The release
    side can briefly wait for a half-enqueued successor to appear; that gap
    closes within a few instructions, so it spins and yields but never
    suspends.
    """

    __slots__ = ("_tail",)

    def __init__(self):
        self._tail = AtomicCell(None)

    def acquire(self, node: LockNode, strategy: StrategyMask = FULL_STRATEGY,
                config: BackoffConfig = DEFAULT_BACKOFF) -> None:
        predecessor = self._tail.exchange(node)
        if predecessor is not None:
            node.locked = True
            predecessor.next = node
            policy = BackoffPolicy(config, strategy, node=node)
            while node.locked:
                policy.on_spin_wait()
        node._held = True

    def release(self, node: LockNode, strategy: StrategyMask = FULL_STRATEGY,
                config: BackoffConfig = DEFAULT_BACKOFF) -> None:
        assert node._held, "release of an McsLock via a node that does not hold it"
        node._held = False
        if node.next is None:
            if self._tail.compare_and_swap(node, None):
                return
            policy = BackoffPolicy(config, strategy, node=None)
            while node.next is None:
                policy.on_spin_wait()
        successor = node.next
        successor.locked = False
        resume_waiter(successor)


class QueueSelection:
    """How a cohort lock spreads threads over its queues."""

    CARRIER = "carrier"
    RANDOM = "random"


class CohortLock:
    """Two-level lock: queue heads compete for a single flag.

    Ownership means holding the outer flag. The fast path is one swap
    attempt on the flag; on failure the task waits (suspension included)
    in one of the inner queues, and the queue head retries the flag with
    spin and yield only. With one queue this degenerates to a queue lock
    feeding an unfair flag.
    """

    __slots__ = ("_outer", "_queues", "selection")

    def __init__(self, n_queues: int = 4, selection: str = QueueSelection.CARRIER):
        if n_queues < 1:
            raise ValueError(f"n_queues must be >= 1, got {n_queues}")
        if selection not in (QueueSelection.CARRIER, QueueSelection.RANDOM):
            raise ValueError(f"unknown queue selection {selection!r}")
        self._outer = AtomicCell(False)
        self._queues = [McsLock() for _ in range(n_queues)]
        self.selection = selection

    @property
    def n_queues(self) -> int:
        return len(self._queues)

    def _select_queue(self) -> int:
        if self.selection == QueueSelection.CARRIER:
            return runtime.current_carrier() % len(self._queues)
        return runtime.current_task().random().randrange(len(self._queues))

    def acquire(self, node: LockNode, strategy: StrategyMask = FULL_STRATEGY,
                config: BackoffConfig = DEFAULT_BACKOFF) -> None:
        if self._outer.compare_and_swap(False, True):
            node.queue_index = None  # fast path: never enqueued
            node._held = True
            return
        index = self._select_queue()
        node.queue_index = index
        self._queues[index].acquire(node, strategy, config)
        # Queue head: compete for the flag with spin and yield only.
        policy = BackoffPolicy(config, strategy, node=None)
        while True:
            if not self._outer.get():
                if self._outer.compare_and_swap(False, True):
                    return
            policy.on_spin_wait()

    def release(self, node: LockNode, strategy: StrategyMask = FULL_STRATEGY,
                config: BackoffConfig = DEFAULT_BACKOFF) -> None:
        assert node._held, "release of a CohortLock via a node that does not hold it"
        prior = self._outer.exchange(False)
        assert prior, "cohort outer flag was not held"
        if node.queue_index is None:
            node._held = False
        else:
            self._queues[node.queue_index].release(node, strategy, config)


class BaselineMutex:
    """Flag fast path plus a waitlist of suspended tasks.

    Contended lockers enqueue their resume handle under a short mutex and
    park immediately; release clears the flag and wakes one waiter, which
    retries. The flag re-check under the waitlist mutex keeps a release
    that races with a new arrival from stranding it.
    """

    __slots__ = ("_flag", "_waitlist", "_waitlist_guard")

    def __init__(self):
        self._flag = AtomicCell(False)
        self._waitlist: list[runtime.ResumeHandle] = []
        self._waitlist_guard = threading.Lock()

    def acquire(self) -> None:
        if self._flag.compare_and_swap(False, True):
            return
        acquired = False

        def publish(handle: runtime.ResumeHandle):
            nonlocal acquired
            with self._waitlist_guard:
                if self._flag.compare_and_swap(False, True):
                    acquired = True
                    return False  # got the flag after all; do not park
                self._waitlist.append(handle)
            return None

        while True:
            runtime.suspend_current(publish)
            if acquired:
                return
            if self._flag.compare_and_swap(False, True):
                return

    def release(self) -> None:
        prior = self._flag.exchange(False)
        assert prior, "release of a BaselineMutex that is not held"
        with self._waitlist_guard:
            handle = self._waitlist.pop(0) if self._waitlist else None
        if handle is not None:
            runtime.resume(handle)


Lock = TtasLock | McsLock | CohortLock | BaselineMutex


def make_lock(name: str, selection: str = QueueSelection.CARRIER) -> Lock:
    """Build a lock from its wire name.

    Accepted names: "TTAS", "MCS", "BASELINE", and "TTAS-MCS-<N>" for a
    cohort lock with N queues.
    """
    upper = name.upper()
    if upper == "TTAS":
        return TtasLock()
    if upper == "MCS":
        return McsLock()
    if upper == "BASELINE":
        return BaselineMutex()
    if upper.startswith("TTAS-MCS-"):
        suffix = upper[len("TTAS-MCS-"):]
        if not suffix.isdigit() or int(suffix) < 1:
            raise ValueError(f"bad queue count in lock name {name!r}")
        return CohortLock(n_queues=int(suffix), selection=selection)
    raise ValueError(f"unknown lock name {name!r} "
                     "(expected TTAS, MCS, TTAS-MCS-<N>, or BASELINE)")


def needs_node(lock: Lock) -> bool:
    return isinstance(lock, (McsLock, CohortLock))


@contextlib.contextmanager
def holding(lock: Lock, strategy: StrategyMask = FULL_STRATEGY,
            config: BackoffConfig = DEFAULT_BACKOFF):
    """Acquire/release any lock kind, managing the node where one is needed."""
    if needs_node(lock):
        node = LockNode()
        lock.acquire(node, strategy, config)
        try:
            yield
        finally:
            lock.release(node, strategy, config)
    elif isinstance(lock, TtasLock):
        lock.acquire(strategy, config)
        try:
            yield
        finally:
            lock.release()
    else:
        lock.acquire()
        try:
            yield
        finally:
            lock.release()
