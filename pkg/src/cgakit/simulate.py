"""Deterministic sender -> channel -> receiver pose synchronization.

One simulated clock drives everything: senders sample parametric object
motion at the codec's send rate, the channel delays each message by a fixed
latency plus seeded uniform jitter, and the receiver re-renders at a fixed
frame rate, interpolating each object between its last two delivered poses
with alpha = time-since-arrival / send-interval (clamped).  Stale deliveries
(jitter reordering) are dropped.

Identical seeds and configuration reproduce the exact message schedule,
trajectories, and discontinuity metrics; only the wall-clock timing figures
vary between runs.  Timing covers the per-frame interpolation batch only.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .interp import FreshInterpolator, InterpolationContext, conventional_interpolate
from .motors import Pose, motor_from_pose
from .pool import AllocationMeter, MultivectorPool
from .wire import Codec, WireMessage, decode, encode, message_size


class SimulationConfigError(ValueError):
    pass


class Pipeline(str, Enum):
    TRADITIONAL = "TRADITIONAL"
    GA_NAIVE = "GA_NAIVE"
    GA_POOLED = "GA_POOLED"


PIPELINE_CODEC = {
    Pipeline.TRADITIONAL: Codec.RAW_POSE,
    Pipeline.GA_NAIVE: Codec.MOTOR16,
    Pipeline.GA_POOLED: Codec.MOTOR16,
}


@dataclass
class MotionModel:
    """Smooth parametric motion: circular orbit, constant spin, breathing scale."""

    orbit_radius: float = 2.0
    orbit_hz: float = 0.5
    spin_hz: float = 0.25
    scale_amplitude: float = 0.25
    scale_hz: float = 0.2


@dataclass
class Scene:
    object_count: int
    motion: MotionModel = field(default_factory=MotionModel)
    seed: int = 0

    def __post_init__(self):
        if self.object_count < 1:
            raise SimulationConfigError("object_count must be >= 1")
        rng = np.random.default_rng(self.seed)
        n = self.object_count
        self._orbit_phase = rng.uniform(0, 2 * math.pi, n)
        self._spin_phase = rng.uniform(0, 2 * math.pi, n)
        self._scale_phase = rng.uniform(0, 2 * math.pi, n)
        axes = rng.normal(size=(n, 3))
        self._axes = axes / np.linalg.norm(axes, axis=1, keepdims=True)
        self._centers = rng.uniform(-1.0, 1.0, size=(n, 3))

    def pose_at(self, index: int, t: float) -> Pose:
        m = self.motion
        a = 2 * math.pi * m.orbit_hz * t + self._orbit_phase[index]
        pos = self._centers[index] + m.orbit_radius * np.array([math.cos(a), math.sin(a), 0.0])
        half = math.pi * m.spin_hz * t + 0.5 * self._spin_phase[index]
        axis = self._axes[index]
        q = np.array([math.cos(half), *(math.sin(half) * axis)])
        s = 1.0 + m.scale_amplitude * math.sin(2 * math.pi * m.scale_hz * t
                                               + self._scale_phase[index])
        return Pose._fast(pos, q, float(s))

    def max_speed(self) -> float:
        """Upper bound on translational speed of any object."""
        return 2 * math.pi * self.motion.orbit_hz * self.motion.orbit_radius


@dataclass
class ChannelModel:
    send_rate_hz: dict = field(default_factory=lambda: {Codec.RAW_POSE: 60.0,
                                                        Codec.MOTOR16: 15.0})
    latency_ms: float = 50.0
    jitter_ms: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.latency_ms < 0 or self.jitter_ms < 0:
            raise SimulationConfigError("latency and jitter must be non-negative")
        for codec, rate in self.send_rate_hz.items():
            if rate <= 0:
                raise SimulationConfigError(f"send rate for {codec} must be positive")


@dataclass
class SyncReport:
    pipeline: str
    codec: str
    object_count: int
    duration_s: float
    send_rate_hz: float
    render_rate_hz: float
    frames: int
    messages: int
    mean_ms_per_frame: float
    max_ms_per_frame: float
    bytes_per_second: float
    total_bytes: int
    allocations_total: int
    allocations_steady: int
    max_discontinuity: float
    schedule_digest: str
    trajectory_digest: str
    config: dict

    CSV_HEADER = ("pipeline,codec,objects,duration_s,send_rate_hz,render_rate_hz,frames,"
                  "messages,mean_ms_per_frame,max_ms_per_frame,bytes_per_second,total_bytes,"
                  "allocations_total,allocations_steady,max_discontinuity")

    def csv_row(self) -> str:
        return (f"{self.pipeline},{self.codec},{self.object_count},{self.duration_s},"
                f"{self.send_rate_hz},{self.render_rate_hz},{self.frames},{self.messages},"
                f"{self.mean_ms_per_frame:.6f},{self.max_ms_per_frame:.6f},"
                f"{self.bytes_per_second},{self.total_bytes},"
                f"{self.allocations_total},{self.allocations_steady},"
                f"{self.max_discontinuity:.9f}")

    def to_json_line(self) -> str:
        payload = dict(self.__dict__)
        return json.dumps(payload, sort_keys=True)


@dataclass
class SimulationTrace:
    """Optional per-event record used by tests; heavy, off by default."""

    arrivals: list = field(default_factory=list)  # (object, seq, arrival_s)
    decoded: dict = field(default_factory=dict)   # (object, seq) -> (t, q, s) tuples
    rendered: list = field(default_factory=list)  # (frame_time, object, position)


class _Receiver:
    """Holds the last two delivered poses per object and interpolates."""

    def __init__(self, pipeline: Pipeline, object_count: int, send_interval: float):
        self.pipeline = pipeline
        self.interval = send_interval
        self.latest_arrival = [None] * object_count
        self.latest_seq = [-1] * object_count
        self.pool = MultivectorPool(capacity=max(128, object_count * 12), grow_increment=32)
        self.meter = AllocationMeter()
        self._ctx: list = [None] * object_count
        self._pair: list = [None] * object_count  # TRADITIONAL (prev, latest)

    def deliver(self, obj: int, seq: int, value, arrival: float):
        if seq <= self.latest_seq[obj]:
            return  # stale: jitter reordered it past a newer message
        self.latest_seq[obj] = seq
        self.latest_arrival[obj] = arrival
        if self.pipeline is Pipeline.TRADITIONAL:
            prev = self._pair[obj][1] if self._pair[obj] else value
            self._pair[obj] = (prev, value)
        elif self.pipeline is Pipeline.GA_POOLED:
            if self._ctx[obj] is None:
                self._ctx[obj] = InterpolationContext(value, value, pool=self.pool)
            else:
                self._ctx[obj].advance(value)
        else:
            if self._ctx[obj] is None:
                self._ctx[obj] = FreshInterpolator(value, value, meter=self.meter)
            else:
                self._ctx[obj].advance(value)

    def ready(self, obj: int) -> bool:
        return self.latest_arrival[obj] is not None

    def pose(self, obj: int, now: float) -> Pose:
        alpha = (now - self.latest_arrival[obj]) / self.interval
        alpha = 0.0 if alpha < 0.0 else (1.0 if alpha > 1.0 else alpha)
        if self.pipeline is Pipeline.TRADITIONAL:
            prev, latest = self._pair[obj]
            return conventional_interpolate(prev, latest, alpha)
        return self._ctx[obj].interpolate(alpha)

    def allocations(self) -> int:
        if self.pipeline is Pipeline.GA_POOLED:
            return self.pool.allocation_count
        if self.pipeline is Pipeline.GA_NAIVE:
            return self.meter.count
        return 0

    def close(self):
        for ctx in self._ctx:
            if ctx is not None:
                ctx.close()


def run_simulation(scene: Scene, channel: ChannelModel, pipeline: Pipeline,
                   duration_s: float, render_rate_hz: float = 90.0,
                   trace: SimulationTrace | None = None) -> SyncReport:
    if duration_s < 1.0:
        raise SimulationConfigError("duration must be at least 1 simulated second")
    if render_rate_hz <= 0:
        raise SimulationConfigError("render rate must be positive")
    pipeline = Pipeline(pipeline)
    codec = PIPELINE_CODEC[pipeline]
    rate = float(channel.send_rate_hz[codec])
    interval = 1.0 / rate

    n = scene.object_count
    n_msgs = int(math.floor(duration_s * rate)) + 1
    rng = np.random.default_rng(channel.seed)
    jitter = rng.uniform(0.0, channel.jitter_ms / 1000.0, size=(n, n_msgs)) \
        if channel.jitter_ms > 0 else np.zeros((n, n_msgs))

    # build and "send" every message up front; the schedule is pure data
    events = []  # (arrival_s, obj, seq, WireMessage)
    sched_hash = hashlib.sha256()
    traj_hash = hashlib.sha256()
    total_bytes = 0
    for seq in range(n_msgs):
        t_send = seq * interval
        ts_ms = int(round(t_send * 1000.0))
        for obj in range(n):
            pose = scene.pose_at(obj, t_send)
            value = pose if codec is Codec.RAW_POSE else motor_from_pose(pose)
            msg = encode(value, codec, obj, ts_ms)
            arrival = t_send + channel.latency_ms / 1000.0 + float(jitter[obj, seq])
            events.append((arrival, obj, seq, msg))
            total_bytes += msg.size
            traj_hash.update(msg.payload)
            sched_hash.update(np.float64(arrival).tobytes())
            sched_hash.update(obj.to_bytes(4, "little") + seq.to_bytes(4, "little"))
    events.sort(key=lambda e: (e[0], e[1], e[2]))

    receiver = _Receiver(pipeline, n, interval)
    frame_times_ms: list[float] = []
    n_frames = int(math.floor(duration_s * render_rate_hz)) + 1
    last_pos = [None] * n
    switched = [False] * n
    max_disc = 0.0
    ev_idx = 0
    warm_allocs = None

    for f in range(n_frames):
        now = f / render_rate_hz
        while ev_idx < len(events) and events[ev_idx][0] <= now:
            arrival, obj, seq, msg = events[ev_idx]
            receiver.deliver(obj, seq, decode(msg), arrival)
            switched[obj] = True
            if trace is not None:
                trace.arrivals.append((obj, seq, arrival))
                val = decode(msg)
                if isinstance(val, Pose):
                    rec = (tuple(val.translation), tuple(val.rotation), val.scale)
                else:
                    rec = tuple(val.coeffs)
                trace.decoded[(obj, seq)] = rec
            ev_idx += 1

        ready = [i for i in range(n) if receiver.ready(i)]
        if warm_allocs is None and len(ready) == n and all(s >= 0 for s in receiver.latest_seq):
            warm_allocs = receiver.allocations()

        t0 = time.perf_counter()
        poses = [receiver.pose(i, now) for i in ready]
        frame_times_ms.append((time.perf_counter() - t0) * 1000.0)

        for i, pose in zip(ready, poses):
            pos = pose.translation
            if switched[i] and last_pos[i] is not None:
                jump = float(np.linalg.norm(pos - last_pos[i]))
                max_disc = max(max_disc, jump)
            switched[i] = False
            last_pos[i] = pos
            if trace is not None:
                trace.rendered.append((now, i, pos.copy()))

    steady = receiver.allocations() - warm_allocs if warm_allocs is not None else 0
    receiver.close()

    times = np.array(frame_times_ms) if frame_times_ms else np.zeros(1)
    config = {
        "scene_seed": scene.seed,
        "channel_seed": channel.seed,
        "latency_ms": channel.latency_ms,
        "jitter_ms": channel.jitter_ms,
        "motion": dict(scene.motion.__dict__),
    }
    return SyncReport(
        pipeline=pipeline.value,
        codec=codec.name,
        object_count=n,
        duration_s=duration_s,
        send_rate_hz=rate,
        render_rate_hz=render_rate_hz,
        frames=n_frames,
        messages=len(events),
        mean_ms_per_frame=float(times.mean()),
        max_ms_per_frame=float(times.max()),
        bytes_per_second=rate * message_size(codec),
        total_bytes=total_bytes,
        allocations_total=receiver.allocations(),
        allocations_steady=int(steady),
        max_discontinuity=max_disc,
        schedule_digest=sched_hash.hexdigest(),
        trajectory_digest=traj_hash.hexdigest(),
        config=config,
    )
