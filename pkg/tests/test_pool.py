import numpy as np
import pytest

from cgakit.pool import AllocationMeter, MultivectorPool, PoolError


def test_acquire_returns_zeroed_buffer():
    pool = MultivectorPool(capacity=2, grow_increment=2)
    buf = pool.acquire()
    assert buf.shape == (32,)
    assert np.all(buf == 0.0)
    buf[:] = 7.0
    pool.release(buf)
    again = pool.acquire()
    assert np.all(again == 0.0)


def test_reuse_keeps_capacity_and_counter():
    pool = MultivectorPool(capacity=4, grow_increment=4)
    buf = pool.acquire()
    pool.release(buf)
    pool.acquire()
    assert pool.capacity == 4
    assert pool.allocation_count == 0


def test_growth_increments_counter_once():
    pool = MultivectorPool(capacity=2, grow_increment=3)
    bufs = [pool.acquire() for _ in range(3)]
    assert pool.capacity == 5
    assert pool.allocation_count == 1
    assert pool.acquired_count == 3
    for b in bufs:
        pool.release(b)
    assert pool.acquired_count == 0


def test_double_release_is_contract_violation():
    pool = MultivectorPool(capacity=1)
    buf = pool.acquire()
    pool.release(buf)
    with pytest.raises(PoolError):
        pool.release(buf)


def test_foreign_buffer_release_is_contract_violation():
    pool = MultivectorPool(capacity=1)
    with pytest.raises(PoolError):
        pool.release(np.zeros(32))


def test_distinct_buffers_while_held():
    pool = MultivectorPool(capacity=2, grow_increment=2)
    a = pool.acquire()
    b = pool.acquire()
    assert a is not b


def test_steady_state_frame_has_zero_allocations():
    # a full interpolation frame over many objects must not grow the pool
    # once the contexts exist
    from cgakit.interp import InterpolationContext
    from cgakit.motors import Pose

    pool = MultivectorPool(capacity=64, grow_increment=32)
    rng = np.random.default_rng(0)
    contexts = []
    for _ in range(200):
        qa = rng.normal(size=4)
        qa /= np.linalg.norm(qa)
        a = Pose(rng.normal(size=3), qa, float(rng.uniform(0.5, 2)))
        b = Pose(a.translation + rng.normal(size=3) * 0.2, qa, a.scale * 1.05)
        contexts.append(InterpolationContext(a, b, pool=pool))
    before = pool.allocation_count
    for alpha in np.linspace(0, 1, 16):
        for ctx in contexts:
            ctx.interpolate(float(alpha))
    assert pool.allocation_count == before
    for ctx in contexts:
        ctx.close()
    assert pool.acquired_count == 0


def test_allocation_meter_counts():
    meter = AllocationMeter()
    meter.fresh(16)
    meter.fresh((16, 16))
    assert meter.count == 2
