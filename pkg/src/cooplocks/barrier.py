"""A reusable barrier that parks its waiters instead of pinning carriers."""

from __future__ import annotations

import threading

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


class _WaitCell:
    """One waiter's parking spot for the current generation."""

    __slots__ = ("resume_word",)

    def __init__(self):
        self.resume_word = AtomicCell(READY_FOR_SUSPEND)


class CoopBarrier:
    """Generation-counting barrier for exactly `parties` tasks per cycle.

    Arrivals register a wait cell and wait on the generation counter through
    the spin/yield/suspend ladder; the last arriver advances the generation
    and wakes every registered cell. The barrier is reusable: no task of
    generation g+1 can pass before every task of generation g has been
    released, because the (g+1)-th cycle cannot complete its arrivals until
    its own `parties` calls happen.
    """

    def __init__(self, parties: int,
                 strategy: StrategyMask = FULL_STRATEGY,
                 config: BackoffConfig = DEFAULT_BACKOFF):
        if parties < 1:
            raise ValueError(f"parties must be >= 1, got {parties}")
        self.parties = parties
        self._strategy = strategy
        self._config = config
        self._guard = threading.Lock()
        self._arrived = 0
        self._generation = 0
        self._cells: list[_WaitCell] = []

    @property
    def generation(self) -> int:
        return self._generation

    def wait(self) -> bool:
        """Block until all parties arrive; True for the last arriver only."""
        with self._guard:
            generation = self._generation
            self._arrived += 1
            if self._arrived > self.parties:
                raise RuntimeError(
                    f"{self._arrived} arrivals for a barrier of {self.parties} parties")
            if self._arrived == self.parties:
                self._arrived = 0
                self._generation += 1
                cells = self._cells
                self._cells = []
                last = True
            else:
                cell = _WaitCell()
                self._cells.append(cell)
                last = False
        if last:
            for waiting in cells:
                resume_waiter(waiting)
            return True
        policy = BackoffPolicy(self._config, self._strategy, node=cell)
        while self._generation == generation:
            policy.on_spin_wait()
        return False
