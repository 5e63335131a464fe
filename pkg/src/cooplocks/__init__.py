"""Locks and a minimal cooperative runtime for lightweight tasks."""

from .atomics import AtomicCell
from .backoff import (
    DEFAULT_BACKOFF,
    FULL_STRATEGY,
    KEEP_ACTIVE,
    READY_FOR_SUSPEND,
    BackoffConfig,
    BackoffPolicy,
    StrategyMask,
    noop_burst,
    resume_waiter,
    try_suspend,
)
from .barrier import CoopBarrier
from .locks import (
    BaselineMutex,
    CohortLock,
    LockNode,
    McsLock,
    QueueSelection,
    TtasLock,
    holding,
    make_lock,
    needs_node,
)
from .runtime import (
    PoolPolicy,
    ResumeHandle,
    Runtime,
    RuntimeConfig,
    Task,
    current_carrier,
    current_runtime,
    current_task,
    join,
    resume,
    spawn,
    start,
    suspend_current,
    yield_now,
)

__all__ = [
    "AtomicCell",
    "BackoffConfig",
    "BackoffPolicy",
    "BaselineMutex",
    "CohortLock",
    "CoopBarrier",
    "DEFAULT_BACKOFF",
    "FULL_STRATEGY",
    "KEEP_ACTIVE",
    "LockNode",
    "McsLock",
    "PoolPolicy",
    "QueueSelection",
    "READY_FOR_SUSPEND",
    "ResumeHandle",
    "Runtime",
    "RuntimeConfig",
    "StrategyMask",
    "Task",
    "TtasLock",
    "current_carrier",
    "current_runtime",
    "current_task",
    "holding",
    "join",
    "make_lock",
    "needs_node",
    "noop_burst",
    "resume",
    "resume_waiter",
    "spawn",
    "start",
    "suspend_current",
    "try_suspend",
    "yield_now",
]
