"""Lock-backed atomic cells.

CPython has no user-level CAS, so read-modify-write sequences that must be
atomic across carrier threads go through a tiny per-cell mutex. Plain loads
and stores of references are already atomic under the interpreter lock; the
cells exist for the compound operations (compare-and-swap, exchange,
fetch-add).
"""

from __future__ import annotations

import threading


class AtomicCell:
    """A single shared slot with compare-and-swap and exchange."""

    __slots__ = ("_guard", "_value")

    def __init__(self, value=None):
        self._guard = threading.Lock()
        self._value = value

    def get(self):
        with self._guard:
            return self._value

    def set(self, value) -> None:
        with self._guard:
            self._value = value

    def compare_and_swap(self, expected, new) -> bool:
        """Set to `new` iff the current value equals `expected`."""
        with self._guard:
            if self._value == expected:
                self._value = new
                return True
            return False

    def exchange(self, new):
        """Set to `new`, returning the prior value."""
        with self._guard:
            prior = self._value
            self._value = new
            return prior

