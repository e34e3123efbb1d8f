"""Compact binary codecs for poses and motors.

Message layout (all little-endian):

    header   16 bytes:  object_id u32 | timestamp_ms u64 | codec u8 | 3 pad bytes
    RAW_POSE 32 bytes:  8 x f32  (t1, t2, t3, qw, qx, qy, qz, s)
    MOTOR16  64 bytes: 16 x f32  (even-grade coefficients in canonical order)

Decoding is strict: wrong payload length, unknown codec bytes and non-finite
floats are rejected, so a round trip is bit-exact at 32-bit precision.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .motors import Motor, Pose

HEADER = struct.Struct("<IQB3x")
HEADER_SIZE = HEADER.size  # 16

_RAW_POSE = struct.Struct("<8f")
_MOTOR16 = struct.Struct("<16f")


class Codec(IntEnum):
    RAW_POSE = 1
    MOTOR16 = 2


PAYLOAD_SIZE = {Codec.RAW_POSE: _RAW_POSE.size, Codec.MOTOR16: _MOTOR16.size}


class WireError(ValueError):
    """Malformed message: bad length, unknown codec, or non-finite payload."""


@dataclass(frozen=True)
class WireMessage:
    object_id: int
    timestamp_ms: int
    codec: Codec
    payload: bytes

    def __post_init__(self):
        expected = PAYLOAD_SIZE[self.codec]
        if len(self.payload) != expected:
            raise WireError(
                f"{self.codec.name} payload must be {expected} bytes, got {len(self.payload)}")

    def to_bytes(self) -> bytes:
        return HEADER.pack(self.object_id, self.timestamp_ms, int(self.codec)) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "WireMessage":
        if len(data) < HEADER_SIZE:
            raise WireError(f"message shorter than the {HEADER_SIZE}-byte header")
        object_id, timestamp_ms, codec_byte = HEADER.unpack_from(data)
        try:
            codec = Codec(codec_byte)
        except ValueError:
            raise WireError(f"unknown codec byte {codec_byte}") from None
        payload = data[HEADER_SIZE:]
        if len(payload) != PAYLOAD_SIZE[codec]:
            raise WireError(
                f"{codec.name} payload must be {PAYLOAD_SIZE[codec]} bytes, got {len(payload)}")
        return cls(object_id, timestamp_ms, codec, payload)

    @property
    def size(self) -> int:
        return HEADER_SIZE + len(self.payload)


def message_size(codec: Codec) -> int:
    return HEADER_SIZE + PAYLOAD_SIZE[codec]


def bytes_per_second(send_rate_hz: float, codec: Codec) -> float:
    """Closed-form bandwidth: rate times (header + payload)."""
    return send_rate_hz * message_size(codec)


def encode(value: Pose | Motor, codec: Codec, object_id: int, timestamp_ms: int) -> WireMessage:
    if codec == Codec.RAW_POSE:
        if isinstance(value, Motor):
            raise WireError("RAW_POSE codec expects a Pose")
        payload = _RAW_POSE.pack(
            value.translation[0], value.translation[1], value.translation[2],
            value.rotation[0], value.rotation[1], value.rotation[2], value.rotation[3],
            value.scale)
        return WireMessage(object_id, timestamp_ms, codec, payload)
    if codec == Codec.MOTOR16:
        if isinstance(value, Pose):
            raise WireError("MOTOR16 codec expects a Motor")
        payload = _MOTOR16.pack(*value.coeffs)
        return WireMessage(object_id, timestamp_ms, codec, payload)
    raise WireError(f"unsupported codec {codec!r}")


def decode(msg: WireMessage) -> Pose | Motor:
    if msg.codec == Codec.RAW_POSE:
        values = _RAW_POSE.unpack(msg.payload)
        if not all(np.isfinite(values)):
            raise WireError("non-finite value in RAW_POSE payload")
        t = np.array(values[0:3], dtype=np.float64)
        q = np.array(values[3:7], dtype=np.float64)
        s = float(values[7])
        if s <= 0.0:
            raise WireError(f"non-positive scale {s} in RAW_POSE payload")
        qn = float(np.linalg.norm(q))
        if abs(qn - 1.0) > 1e-5:
            raise WireError(f"quaternion norm {qn:g} too far from 1 in RAW_POSE payload")
        # keep the f32-exact component values so a re-encode is bit-identical;
        # the norm is unit to f32 precision, which downstream consumers accept
        return Pose._fast(t, q, s)
    values = _MOTOR16.unpack(msg.payload)
    if not all(np.isfinite(values)):
        raise WireError("non-finite value in MOTOR16 payload")
    return Motor(np.array(values, dtype=np.float64))
