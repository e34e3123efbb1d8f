"""Extensible pool of reusable 32-slot coefficient buffers.

One pool, one worker: a pool instance is bound to a single execution
context and is not safe to share.  Buffers handed out by `acquire` are
zero-filled and belong to the caller until released.  The allocation
counter only moves when the pool has to grow, which is what the
steady-state tests watch to prove the frame loop stops reserving memory.
"""

from __future__ import annotations

import numpy as np

from .blades import BLADE_COUNT


class PoolError(RuntimeError):
    """Buffer lifecycle contract violation (double release, foreign buffer)."""


class MultivectorPool:
    def __init__(self, capacity: int = 128, grow_increment: int = 32):
        if capacity < 1 or grow_increment < 1:
            raise ValueError("capacity and grow_increment must be positive")
        self.grow_increment = grow_increment
        self.allocation_count = 0  # number of growth events, not buffers
        self.acquired_count = 0
        self._free: list[np.ndarray] = [np.zeros(BLADE_COUNT) for _ in range(capacity)]
        self._capacity = capacity
        self._live: set[int] = set()

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def free_count(self) -> int:
        return len(self._free)

    def acquire(self) -> np.ndarray:
        if not self._free:
            self._free.extend(np.zeros(BLADE_COUNT) for _ in range(self.grow_increment))
            self._capacity += self.grow_increment
            self.allocation_count += 1
        buf = self._free.pop()
        buf.fill(0.0)
        self._live.add(id(buf))
        self.acquired_count += 1
        return buf

    def release(self, buf: np.ndarray) -> None:
        key = id(buf)
        if key not in self._live:
            raise PoolError("released buffer was not acquired from this pool (or released twice)")
        self._live.remove(key)
        self.acquired_count -= 1
        self._free.append(buf)


class AllocationMeter:
    """Counts fresh buffer creations for the non-pooled pipeline."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def fresh(self, shape) -> np.ndarray:
        self.count += 1
        return np.zeros(shape)
