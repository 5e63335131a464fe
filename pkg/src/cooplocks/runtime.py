"""Cooperative runtime: carrier slots executing lightweight tasks.

Each lightweight task owns a real OS thread, but the threads are gated by
per-task permit locks so that at most one task runs per carrier and a task
leaves its carrier only at an explicit switch point (yield, suspend, join,
or completion). Carriers are tokens passed directly from a descheduling
task to the next ready task; a carrier's own thread only runs while its
token is idle, waiting for work to appear in the ready pools.

The permit locks double as one-shot wakeup permits: releasing a permit
before its owner parks simply pre-arms the park, so a resume that races
with the final descheduling step is never lost.
"""

from __future__ import annotations

import collections
import enum
import random
import sys
import threading
from dataclasses import dataclass
from typing import Callable

ResumeHandle = int

#: Resume handles are machine-word-like integers; 0 and 1 are reserved for
#: the suspend/resume handshake protocol, so real handles start at 2.
FIRST_RESUME_HANDLE = 2

_tls = threading.local()


class PoolPolicy(enum.Enum):
    """Where ready tasks wait for a carrier."""

    GLOBAL_FIFO = "global"
    PER_CARRIER_FIFO = "percarrier"


@dataclass(frozen=True)
class RuntimeConfig:
    """Static configuration of a runtime instance.

    `stack_size` is the OS stack given to each task thread. `switch_interval`
    tightens the interpreter's thread switch interval for the lifetime of the
    run (busy-spinning tasks otherwise delay cross-carrier wakeups by up to
    the default 5 ms); pass None to leave it alone.
    """

    carriers: int = 1
    pool_policy: PoolPolicy = PoolPolicy.GLOBAL_FIFO
    stack_size: int = 64 * 1024
    switch_interval: float | None = 0.0005
    seed: int | None = None

    def __post_init__(self):
        if self.carriers < 1:
            raise ValueError(f"carriers must be >= 1, got {self.carriers}")
        if self.stack_size and self.stack_size < 32 * 1024:
            raise ValueError("stack_size below the 32 KiB platform minimum")


class Task:
    """A lightweight task: a body, an identity, and a schedulable state."""

    __slots__ = ("id", "runtime", "_body", "_permit", "carrier", "_done",
                 "_joined", "_join_waiters", "_guard", "result", "error",
                 "_rng")

    def __init__(self, runtime: Runtime, task_id: int, body: Callable):
        self.id = task_id
        self.runtime = runtime
        self._body = body
        # Held (locked) means "not dispatched"; release is the dispatch.
        self._permit = threading.Lock()
        self._permit.acquire()
        self.carrier: _Carrier | None = None
        self._done = False
        self._joined = False
        self._join_waiters: list[ResumeHandle] = []
        self._guard = threading.Lock()
        self.result = None
        self.error: BaseException | None = None
        self._rng: random.Random | None = None

    @property
    def done(self) -> bool:
        return self._done

    def random(self) -> random.Random:
        """Per-task PRNG, seeded from the task id."""
        if self._rng is None:
            self._rng = random.Random(self.id)
        return self._rng

    def __repr__(self):
        return f"<Task {self.id} {'done' if self._done else 'live'}>"


class _Carrier:
    """One carrier slot: an index, a steal PRNG, and an idle thread."""

    __slots__ = ("index", "runtime", "_permit", "thread", "rng")

    def __init__(self, runtime: Runtime, index: int, seed: int | None):
        self.runtime = runtime
        self.index = index
        self._permit = threading.Lock()
        self._permit.acquire()
        self.rng = random.Random(index if seed is None else seed + index)
        self.thread: threading.Thread | None = None


class Runtime:
    """Owns the carriers, the ready pools, and the resume-handle registry."""

    def __init__(self, config: RuntimeConfig | None = None, **kwargs):
        if config is None:
            config = RuntimeConfig(**kwargs)
        elif kwargs:
            raise TypeError("pass either a RuntimeConfig or keyword fields")
        self.config = config
        self.carriers = [_Carrier(self, i, config.seed)
                         for i in range(config.carriers)]
        if config.pool_policy is PoolPolicy.GLOBAL_FIFO:
            self._pools = [collections.deque()]
        else:
            self._pools = [collections.deque() for _ in range(config.carriers)]
        self._pool_cond = threading.Condition()
        # One guard for all three: the invariant spawned - completed == live
        # must hold at every observable instant.
        self._count_guard = threading.Lock()
        self._live = 0
        self._spawned = 0
        self._completed = 0
        self._shutdown = False
        self._done_event = threading.Event()
        self._next_id = FIRST_RESUME_HANDLE
        self._id_guard = threading.Lock()
        self._suspended: dict[ResumeHandle, Task] = {}
        self._started = False

    # -- identifiers ---------------------------------------------------

    def _allocate_id(self) -> int:
        # Task ids and resume handles share one sequence: both must be
        # unique word-like values > 1.
        with self._id_guard:
            value = self._next_id
            self._next_id += 1
            return value

    # -- ready pools ---------------------------------------------------

    def _pool_of(self, carrier: _Carrier):
        return self._pools[0] if len(self._pools) == 1 else self._pools[carrier.index]

    def _enqueue(self, task: Task, carrier: _Carrier) -> None:
        with self._pool_cond:
            self._pool_of(carrier).append(task)
            self._pool_cond.notify()

    def _try_pop(self, carrier: _Carrier) -> Task | None:
        with self._pool_cond:
            pool = self._pool_of(carrier)
            if pool:
                return pool.popleft()
            if len(self._pools) > 1:
                # Local pool empty: steal the oldest task of a random victim.
                order = list(range(len(self._pools)))
                carrier.rng.shuffle(order)
                for victim in order:
                    if self._pools[victim]:
                        return self._pools[victim].popleft()
        return None

    def _pop_blocking(self, carrier: _Carrier) -> Task | None:
        while True:
            task = self._try_pop(carrier)
            if task is not None:
                return task
            with self._pool_cond:
                if self._shutdown:
                    return None
                # Timed wait: a notify can slip between _try_pop and wait.
                self._pool_cond.wait(0.001)
            if self._shutdown:
                return None

    # -- token passing ---------------------------------------------------

    def _unpark(self, task: Task, carrier: _Carrier) -> None:
        # Order matters: the carrier assignment must be visible before the
        # permit release that lets the task run.
        task.carrier = carrier
        task._permit.release()

    def _hand_off_carrier(self, carrier: _Carrier) -> None:
        """Pass the carrier token to the next ready task, or back to idle."""
        nxt = self._try_pop(carrier)
        if nxt is not None:
            self._unpark(nxt, carrier)
        else:
            carrier._permit.release()

    def _carrier_loop(self, carrier: _Carrier) -> None:
        while True:
            task = self._pop_blocking(carrier)
            if task is None:
                return
            self._unpark(task, carrier)
            carrier._permit.acquire()  # park until the token comes back

    # -- task lifecycle --------------------------------------------------

    def _task_main(self, task: Task) -> None:
        task._permit.acquire()  # first dispatch
        _tls.task = task
        try:
            task.result = task._body()
        except BaseException as exc:  # noqa: BLE001 - reported via join
            task.error = exc
        finally:
            with task._guard:
                task._done = True
                waiters = task._join_waiters
                task._join_waiters = []
            for handle in waiters:
                self.resume(handle)  # joiners wake into this carrier's pool
            _tls.task = None
            with self._count_guard:
                self._completed += 1
                self._live -= 1
                last = self._live == 0
            if last:
                self._shutdown = True
                self._done_event.set()
                with self._pool_cond:
                    self._pool_cond.notify_all()
            self._hand_off_carrier(task.carrier)

    def _make_task(self, body: Callable) -> Task:
        task = Task(self, self._allocate_id(), body)
        thread = threading.Thread(
            target=self._task_main, args=(task,), daemon=True,
            name=f"coop-task-{task.id}",
        )
        thread.start()
        return task

    def _home_carrier(self) -> _Carrier:
        current = getattr(_tls, "task", None)
        if current is not None and current.carrier is not None:
            return current.carrier
        return self.carriers[0]

    # -- public operations -------------------------------------------------

    def spawn(self, body: Callable) -> Task:
        """Create a task and enqueue it; it runs once a carrier picks it up."""
        if self._shutdown:
            raise RuntimeError("spawn after runtime shutdown")
        with self._count_guard:
            self._live += 1
            self._spawned += 1
        try:
            task = self._make_task(body)
        except BaseException:
            with self._count_guard:
                self._live -= 1
                self._spawned -= 1
            raise
        self._enqueue(task, self._home_carrier())
        return task

    def yield_now(self) -> None:
        """Reenqueue the current task and run the next ready one.

        Returns immediately when the ready pool is empty: there is nothing
        to switch to.
        """
        task = _current_task_strict(self)
        _check_switch_allowed()
        carrier = task.carrier
        with self._pool_cond:
            if not self._pool_of(carrier):
                return
            self._pool_of(carrier).append(task)
            self._pool_cond.notify()
        nxt = self._try_pop(carrier)
        if nxt is task:
            return
        if nxt is not None:
            self._unpark(nxt, carrier)
        else:
            carrier._permit.release()
        task._permit.acquire()

    def suspend_current(self, publish: Callable[[ResumeHandle], object]) -> None:
        """Deschedule the current task until a matching resume.

        `publish` receives a fresh handle before the task parks; a resume
        issued any time after `publish` returns is guaranteed to wake the
        task. `publish` may return False to cancel the suspension (the
        handle is retired and the task keeps running) - in that case it
        must not have made the handle visible to anyone. It must not
        itself context-switch.
        """
        task = _current_task_strict(self)
        _check_switch_allowed()
        # Capture the quantum's carrier before publishing: a resume racing
        # with the final descheduling step may re-dispatch the task and
        # reassign task.carrier before we hand our token off.
        carrier = task.carrier
        handle = self._allocate_id()
        self._suspended[handle] = task
        _tls.no_switch = getattr(_tls, "no_switch", 0) + 1
        try:
            keep = publish(handle)
        finally:
            _tls.no_switch -= 1
        if keep is False:
            if self._suspended.pop(handle, None) is None:
                # Somebody resumed a handle whose publish claimed to have
                # cancelled: the task is now enqueued while still running.
                raise RuntimeError(
                    "publish returned False after exposing the handle")
            return
        self._hand_off_carrier(carrier)
        task._permit.acquire()

    def resume(self, handle: ResumeHandle) -> None:
        """Reschedule the task suspended under `handle`. Consumes the handle."""
        if not isinstance(handle, int) or handle < FIRST_RESUME_HANDLE:
            raise ValueError(f"not a resume handle: {handle!r}")
        task = self._suspended.pop(handle, None)
        if task is None:
            raise RuntimeError(f"resume handle {handle} unknown or already consumed")
        self._enqueue(task, self._home_carrier())

    def current_carrier(self) -> int:
        """Index of the carrier executing the calling task."""
        task = _current_task_strict(self)
        return task.carrier.index

    def join(self, task: Task):
        """Wait cooperatively until `task` completes; returns its result.

        Re-raises the exception of a failed task. Each task may be joined
        at most once.
        """
        if task.runtime is not self:
            raise RuntimeError("cannot join a task from a different runtime")
        with task._guard:
            if task._joined:
                raise RuntimeError(f"{task!r} already joined")
            task._joined = True
            done = task._done
        if not done:
            def publish(handle: ResumeHandle):
                with task._guard:
                    if task._done:
                        return False
                    task._join_waiters.append(handle)
                return None

            self.suspend_current(publish)
        if task.error is not None:
            raise task.error
        return task.result

    def start(self, root: Callable):
        """Run `root` as the first task; return its result once all work is done.

        Launches the carrier threads, waits until every spawned task has
        completed, and shuts the runtime down. One-shot: a Runtime cannot
        be started twice.
        """
        if self._started:
            raise RuntimeError("runtime already started")
        self._started = True
        old_interval = None
        old_stack = None
        if self.config.switch_interval is not None:
            old_interval = sys.getswitchinterval()
            sys.setswitchinterval(self.config.switch_interval)
        if self.config.stack_size:
            old_stack = threading.stack_size(self.config.stack_size)
        try:
            with self._count_guard:
                self._live += 1
                self._spawned += 1
            root_task = self._make_task(root)
            self._enqueue(root_task, self.carriers[0])
            for carrier in self.carriers:
                carrier.thread = threading.Thread(
                    target=self._carrier_loop, args=(carrier,), daemon=True,
                    name=f"coop-carrier-{carrier.index}",
                )
                carrier.thread.start()
            self._done_event.wait()
            for carrier in self.carriers:
                carrier.thread.join()
        finally:
            if old_stack is not None:
                threading.stack_size(old_stack)
            if old_interval is not None:
                sys.setswitchinterval(old_interval)
        if root_task.error is not None:
            raise root_task.error
        return root_task.result

    @property
    def live_tasks(self) -> int:
        with self._count_guard:
            return self._live

    @property
    def spawned_count(self) -> int:
        with self._count_guard:
            return self._spawned

    @property
    def completed_count(self) -> int:
        with self._count_guard:
            return self._completed

    def counters(self) -> tuple[int, int, int]:
        """Consistent (spawned, completed, live) snapshot."""
        with self._count_guard:
            return (self._spawned, self._completed, self._live)


# -- module-level API over the current task's runtime -----------------------

def current_task() -> Task:
    """The task executing the caller. Raises outside task context."""
    task = getattr(_tls, "task", None)
    if task is None:
        raise RuntimeError("not inside a cooperative task")
    return task


def _current_task_strict(runtime: Runtime) -> Task:
    task = current_task()
    if task.runtime is not runtime:
        raise RuntimeError("task belongs to a different runtime")
    return task


def _check_switch_allowed() -> None:
    if getattr(_tls, "no_switch", 0):
        raise RuntimeError("context switch inside a publish callback")


def current_runtime() -> Runtime:
    return current_task().runtime


def spawn(body: Callable) -> Task:
    return current_runtime().spawn(body)


def yield_now() -> None:
    current_runtime().yield_now()


def suspend_current(publish: Callable[[ResumeHandle], object]) -> None:
    current_runtime().suspend_current(publish)


def resume(handle: ResumeHandle) -> None:
    current_runtime().resume(handle)


def current_carrier() -> int:
    return current_runtime().current_carrier()


def join(task: Task):
    return current_runtime().join(task)


def start(config: RuntimeConfig | Runtime | None, root: Callable, **kwargs):
    """Build a runtime from `config` (or kwargs) and run `root` to completion."""
    if isinstance(config, Runtime):
        return config.start(root)
    runtime = Runtime(config, **kwargs) if config is not None else Runtime(**kwargs)
    return runtime.start(root)
