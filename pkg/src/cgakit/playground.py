"""Session service for interactive multivector manipulation.

Protocol "ga-playground/1": length-prefixed JSON messages, one request to one
response.  Framing is the ASCII byte length, a newline, then exactly that many
UTF-8 JSON bytes.  Every response echoes the full 32-coefficient state of each
affected object together with its classification, so clients never perform
algebra themselves.  See docs/protocol.md for the field-by-field schema.

The service layer adds no numeric logic: everything flows through the algebra,
motor, classification, and interpolation modules.
"""

from __future__ import annotations

import json
import socketserver
import sys
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraError, Multivector, e_inf
from .classify import GeometricObject, classify
from .interp import DegenerateInterpolantError, InterpolationContext
from .motors import (
    GeometryError,
    Motor,
    Pose,
    embed_plane,
    embed_point,
    embed_sphere,
    motor_from_pose,
    sandwich,
)

PROTOCOL_VERSION = "ga-playground/1"
UNDO_DEPTH = 32
DEFAULT_INTERPOLATION_SAMPLES = 60


@dataclass
class ObjectEntry:
    raw: Multivector
    classification: GeometricObject
    history: deque = field(default_factory=lambda: deque(maxlen=UNDO_DEPTH))


class Session:
    def __init__(self):
        self.objects: dict[str, ObjectEntry] = {}
        self._counter = 0

    def fresh_name(self) -> str:
        self._counter += 1
        while f"obj{self._counter}" in self.objects:
            self._counter += 1
        return f"obj{self._counter}"


def _params_jsonable(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, np.ndarray):
            out[k] = [float(x) for x in v]
        elif isinstance(v, (list, tuple)):
            out[k] = [[float(y) for y in x] if isinstance(x, (np.ndarray, list, tuple))
                      else float(x) for x in v]
        elif isinstance(v, (bool, str)):
            out[k] = v
        else:
            out[k] = float(v)
    return out


def _entry_payload(name: str, entry: ObjectEntry) -> dict:
    return {
        "name": name,
        "coeffs": [float(c) for c in entry.raw.coeffs],
        "kind": entry.classification.kind.value,
        "grade": entry.classification.grade,
        "params": _params_jsonable(entry.classification.params),
    }


def _store(session: Session, name: str | None, raw: Multivector) -> tuple[str, ObjectEntry]:
    if name is None:
        name = session.fresh_name()
    elif name in session.objects:
        raise KeyError(f"object name {name!r} already exists")
    entry = ObjectEntry(raw=raw, classification=classify(raw))
    session.objects[name] = entry
    return name, entry


def _lookup(session: Session, name) -> ObjectEntry:
    if not isinstance(name, str) or name not in session.objects:
        raise KeyError(f"unknown object {name!r}")
    return session.objects[name]


def _pose_from_payload(payload: dict) -> Pose:
    return Pose(np.asarray(payload["translation"], dtype=np.float64),
                np.asarray(payload["rotation"], dtype=np.float64),
                float(payload.get("scale", 1.0)))


def _motor_from_payload(payload: dict) -> Motor:
    if "pose" in payload:
        return motor_from_pose(_pose_from_payload(payload["pose"]))
    if "coeffs" in payload:
        coeffs = np.asarray(payload["coeffs"], dtype=np.float64)
        return Motor(coeffs)
    raise ValueError("motor payload needs either 'pose' or 'coeffs'")


# ---------------------------------------------------------------------------
# operations


def _op_create_primitive(session: Session, req: dict) -> dict:
    primitive = req.get("primitive")
    if primitive == "point":
        raw = embed_point(np.asarray(req["position"], dtype=np.float64))
    elif primitive == "sphere":
        raw = embed_sphere(np.asarray(req["center"], dtype=np.float64), float(req["radius"]))
    elif primitive == "plane":
        raw = embed_plane(np.asarray(req["normal"], dtype=np.float64), float(req["offset"]))
    else:
        raise ValueError(f"unknown primitive {primitive!r}")
    name, entry = _store(session, req.get("name"), raw)
    return {"objects": [_entry_payload(name, entry)]}


def _op_create_from_coeffs(session: Session, req: dict) -> dict:
    coeffs = np.asarray(req["coeffs"], dtype=np.float64)
    name, entry = _store(session, req.get("name"), Multivector(coeffs))
    return {"objects": [_entry_payload(name, entry)]}


def _op_set_coefficient(session: Session, req: dict) -> dict:
    entry = _lookup(session, req.get("name"))
    index = int(req["index"])
    if not 0 <= index < 32:
        raise ValueError(f"coefficient index {index} out of range 0..31")
    coeffs = entry.raw.coeffs.copy()
    entry.history.append(coeffs.copy())
    coeffs[index] = float(req["value"])
    entry.raw = Multivector(coeffs)
    entry.classification = classify(entry.raw)
    return {"objects": [_entry_payload(req["name"], entry)]}


def _op_combine(session: Session, req: dict) -> dict:
    operands = req.get("operands", [])
    if not 2 <= len(operands) <= 3:
        raise ValueError("combine expects 2 or 3 operand names")
    result = _lookup(session, operands[0]).raw
    for other in operands[1:]:
        result = result ^ _lookup(session, other).raw
    if req.get("wedge_inf"):
        result = result ^ e_inf
    name, entry = _store(session, req.get("name"), result)
    return {"objects": [_entry_payload(name, entry)]}


def _op_dual(session: Session, req: dict) -> dict:
    source = _lookup(session, req.get("source"))
    name, entry = _store(session, req.get("name"), source.raw.dual())
    return {"objects": [_entry_payload(name, entry)]}


def _op_deform(session: Session, req: dict) -> dict:
    entry = _lookup(session, req.get("name"))
    motor = _motor_from_payload(req.get("motor", {}))
    entry.history.append(entry.raw.coeffs.copy())
    entry.raw = sandwich(motor, entry.raw)
    entry.classification = classify(entry.raw)
    return {"objects": [_entry_payload(req["name"], entry)]}


def _op_interpolate(session: Session, req: dict) -> dict:
    entry = _lookup(session, req.get("name"))
    pose_a = _pose_from_payload(req["pose_a"])
    pose_b = _pose_from_payload(req["pose_b"])
    k = int(req.get("samples", DEFAULT_INTERPOLATION_SAMPLES))
    if not 1 <= k <= 1000:
        raise ValueError("samples must be between 1 and 1000")
    ctx = InterpolationContext(pose_a, pose_b)
    samples = []
    try:
        for i in range(k + 1):
            alpha = i / k
            pose = ctx.interpolate(alpha)
            moved = sandwich(motor_from_pose(pose), entry.raw)
            obj = classify(moved)
            samples.append({
                "alpha": alpha,
                "coeffs": [float(c) for c in moved.coeffs],
                "kind": obj.kind.value,
                "grade": obj.grade,
                "params": _params_jsonable(obj.params),
            })
    finally:
        ctx.close()
    return {"objects": [_entry_payload(req["name"], entry)], "samples": samples}


def _op_list(session: Session, req: dict) -> dict:
    return {"objects": [_entry_payload(n, e) for n, e in session.objects.items()]}


def _op_delete(session: Session, req: dict) -> dict:
    name = req.get("name")
    _lookup(session, name)
    del session.objects[name]
    return {"objects": []}


def _op_undo(session: Session, req: dict) -> dict:
    entry = _lookup(session, req.get("name"))
    if not entry.history:
        raise ValueError(f"nothing to undo for {req.get('name')!r}")
    coeffs = entry.history.pop()
    entry.raw = Multivector(coeffs)
    entry.classification = classify(entry.raw)
    return {"objects": [_entry_payload(req["name"], entry)]}


_OPS = {
    "create_primitive": _op_create_primitive,
    "create_from_coeffs": _op_create_from_coeffs,
    "set_coefficient": _op_set_coefficient,
    "combine": _op_combine,
    "dual": _op_dual,
    "deform": _op_deform,
    "interpolate": _op_interpolate,
    "list": _op_list,
    "delete": _op_delete,
    "undo": _op_undo,
}


def handle(session: Session, request: dict) -> dict:
    """Process one request dict and return the response dict."""
    response = {"proto": PROTOCOL_VERSION, "id": request.get("id")}
    if request.get("proto") != PROTOCOL_VERSION:
        response.update(status="error",
                        error=f"unsupported protocol {request.get('proto')!r}")
        return response
    op = request.get("op")
    func = _OPS.get(op)
    if func is None:
        response.update(status="error", error=f"unknown op {op!r}")
        return response
    try:
        result = func(session, request)
    except (KeyError, ValueError, TypeError, AlgebraError, GeometryError,
            DegenerateInterpolantError) as exc:
        detail = exc.args[0] if exc.args else str(exc)
        response.update(status="error", error=str(detail))
        return response
    response.update(status="ok", **result)
    return response


# ---------------------------------------------------------------------------
# framing and transports


def write_message(stream, payload: dict) -> None:
    data = json.dumps(payload).encode("utf-8")
    stream.write(f"{len(data)}\n".encode("ascii"))
    stream.write(data)
    stream.flush()


def read_message(stream) -> dict | None:
    """Read one framed message; None on clean EOF."""
    header = b""
    while not header.endswith(b"\n"):
        ch = stream.read(1)
        if not ch:
            if header:
                raise ValueError("truncated frame header")
            return None
        header += ch
    try:
        length = int(header.strip())
    except ValueError:
        raise ValueError(f"bad frame header {header!r}") from None
    if length < 0 or length > 16 * 1024 * 1024:
        raise ValueError(f"unreasonable frame length {length}")
    data = b""
    while len(data) < length:
        chunk = stream.read(length - len(data))
        if not chunk:
            raise ValueError("truncated frame body")
        data += chunk
    return json.loads(data.decode("utf-8"))


def serve_stream(rx, tx) -> None:
    """One session over a byte-stream pair until EOF."""
    session = Session()
    while True:
        try:
            request = read_message(rx)
        except ValueError as exc:
            write_message(tx, {"proto": PROTOCOL_VERSION, "id": None,
                               "status": "error", "error": str(exc)})
            return
        if request is None:
            return
        write_message(tx, handle(session, request))


def serve_stdio() -> None:
    serve_stream(sys.stdin.buffer, sys.stdout.buffer)


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        serve_stream(self.rfile, self.wfile)


class PlaygroundServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def serve_socket(port: int, host: str = "127.0.0.1") -> None:
    with PlaygroundServer((host, port), _Handler) as server:
        print(f"ga-playground/1 listening on {host}:{server.server_address[1]}",
              file=sys.stderr, flush=True)
        server.serve_forever()
