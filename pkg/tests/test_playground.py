import io
import json
import math
import socket
import threading

import numpy as np
import pytest

from cgakit.algebra import e_inf
from cgakit.classify import classify
from cgakit.motors import (
    Pose,
    embed_point,
    embed_sphere,
    motor_from_pose,
    sandwich,
    translator,
)
from cgakit.playground import (
    PROTOCOL_VERSION,
    PlaygroundServer,
    Session,
    _Handler,
    handle,
    read_message,
    write_message,
)

REQ_ID = [0]


def req(op, **payload):
    REQ_ID[0] += 1
    return {"proto": PROTOCOL_VERSION, "id": REQ_ID[0], "op": op, **payload}


def ok(session, op, **payload):
    resp = handle(session, req(op, **payload))
    assert resp["status"] == "ok", resp.get("error")
    return resp


def err(session, op, **payload):
    resp = handle(session, req(op, **payload))
    assert resp["status"] == "error"
    return resp


def test_protocol_version_required():
    resp = handle(Session(), {"proto": "nope/9", "id": 1, "op": "list"})
    assert resp["status"] == "error"
    assert resp["proto"] == PROTOCOL_VERSION


def test_unknown_op():
    assert "unknown op" in err(Session(), "frobnicate")["error"]


def test_create_point_and_echo():
    s = Session()
    resp = ok(s, "create_primitive", primitive="point", position=[1, 2, 3], name="p1")
    obj = resp["objects"][0]
    assert obj["name"] == "p1"
    assert obj["kind"] == "point"
    assert len(obj["coeffs"]) == 32
    assert np.allclose(obj["coeffs"], embed_point([1, 2, 3]).coeffs)
    assert np.allclose(obj["params"]["center"], [1, 2, 3])


def test_create_all_primitives_and_list():
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[0, 0, 0])
    ok(s, "create_primitive", primitive="sphere", center=[1, 0, 0], radius=2.0)
    ok(s, "create_primitive", primitive="plane", normal=[0, 0, 1], offset=1.0)
    listing = ok(s, "list")
    kinds = [o["kind"] for o in listing["objects"]]
    assert kinds == ["point", "sphere", "plane"]


def test_duplicate_name_rejected():
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[0, 0, 0], name="x")
    assert "exists" in err(s, "create_primitive", primitive="point",
                           position=[1, 1, 1], name="x")["error"]


def test_unknown_name_errors():
    s = Session()
    assert "unknown object" in err(s, "set_coefficient", name="ghost",
                                   index=1, value=2.0)["error"]
    assert "unknown object" in err(s, "delete", name="ghost")["error"]


def test_combine_two_points_with_infinity_is_line():
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[0, 1, 0], name="p1")
    ok(s, "create_primitive", primitive="point", position=[2, 1, 0], name="p2")
    resp = ok(s, "combine", operands=["p1", "p2"], wedge_inf=True, name="l")
    obj = resp["objects"][0]
    assert obj["kind"] == "line"
    direct = embed_point([0, 1, 0]) ^ embed_point([2, 1, 0]) ^ e_inf
    assert np.allclose(obj["coeffs"], direct.coeffs)


def test_combine_two_spheres_is_circle():
    s = Session()
    ok(s, "create_primitive", primitive="sphere", center=[-0.5, 0, 0], radius=1.0, name="s1")
    ok(s, "create_primitive", primitive="sphere", center=[0.5, 0, 0], radius=1.0, name="s2")
    resp = ok(s, "combine", operands=["s1", "s2"])
    assert resp["objects"][0]["kind"] == "circle"


def test_create_from_coeffs_and_dual():
    s = Session()
    sphere = embed_sphere([0, 0, 0], 1.0)
    ok(s, "create_from_coeffs", coeffs=[float(c) for c in sphere.coeffs], name="s")
    resp = ok(s, "dual", source="s", name="sd")
    assert resp["objects"][0]["kind"] == "sphere"
    assert resp["objects"][0]["grade"] == 4
    assert np.allclose(resp["objects"][0]["coeffs"], sphere.dual().coeffs)


def test_set_coefficient_renormalization_invariance():
    # scaling e4/e5 entries off the normalized form must not change the
    # classified sphere parameters
    s = Session()
    resp = ok(s, "create_primitive", primitive="sphere", center=[1, 0, 0], radius=0.5,
              name="s")
    before = resp["objects"][0]["params"]
    coeffs = np.array(resp["objects"][0]["coeffs"])
    doubled = coeffs * 2.0
    ok(s, "create_from_coeffs", coeffs=[float(c) for c in doubled], name="s2")
    after = ok(s, "list")["objects"][-1]["params"]
    assert np.allclose(before["center"], after["center"], atol=1e-9)
    assert before["radius"] == pytest.approx(after["radius"])


def test_set_coefficient_moves_point_and_undo_restores():
    s = Session()
    resp = ok(s, "create_primitive", primitive="point", position=[1, 2, 3], name="p")
    original = list(resp["objects"][0]["coeffs"])
    moved = ok(s, "set_coefficient", name="p", index=1, value=5.0)
    assert moved["objects"][0]["coeffs"][1] == 5.0
    restored = ok(s, "undo", name="p")
    assert restored["objects"][0]["coeffs"] == original
    assert "nothing to undo" in err(s, "undo", name="p")["error"]


def test_undo_depth_is_bounded():
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[0, 0, 0], name="p")
    for i in range(40):
        ok(s, "set_coefficient", name="p", index=1, value=float(i))
    count = 0
    while handle(s, req("undo", name="p"))["status"] == "ok":
        count += 1
    assert count == 32


def test_deform_with_pose_matches_direct_sandwich():
    s = Session()
    ok(s, "create_primitive", primitive="sphere", center=[0, 0, 0], radius=1.0, name="s")
    pose = {"translation": [1.0, 2.0, 0.0],
            "rotation": [math.sqrt(0.5), 0.0, 0.0, math.sqrt(0.5)], "scale": 2.0}
    resp = ok(s, "deform", name="s", motor={"pose": pose})
    direct = sandwich(motor_from_pose(Pose([1, 2, 0], pose["rotation"], 2.0)),
                      embed_sphere([0, 0, 0], 1.0))
    assert np.allclose(resp["objects"][0]["coeffs"], direct.coeffs)
    assert resp["objects"][0]["kind"] == "sphere"
    assert np.allclose(resp["objects"][0]["params"]["center"], [1, 2, 0], atol=1e-9)
    assert resp["objects"][0]["params"]["radius"] == pytest.approx(2.0)


def test_deform_with_motor_coeffs():
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[0, 0, 0], name="p")
    motor = translator([1.0, 0.0, 0.0])
    resp = ok(s, "deform", name="p", motor={"coeffs": [float(c) for c in motor.coeffs]})
    assert np.allclose(resp["objects"][0]["params"]["center"], [1, 0, 0], atol=1e-12)


def test_deform_rejects_singular_motor():
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[0, 0, 0], name="p")
    assert err(s, "deform", name="p", motor={"coeffs": [0.0] * 16})


def test_interpolate_endpoints_match_entered_poses():
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[1, 0, 0], name="p")
    pose_a = {"translation": [0, 0, 0], "rotation": [1, 0, 0, 0], "scale": 1.0}
    pose_b = {"translation": [2, 0, 0], "rotation": [1, 0, 0, 0], "scale": 1.0}
    resp = ok(s, "interpolate", name="p", pose_a=pose_a, pose_b=pose_b, samples=4)
    samples = resp["samples"]
    assert len(samples) == 5
    assert samples[0]["alpha"] == 0.0
    assert samples[-1]["alpha"] == 1.0
    assert np.allclose(samples[0]["params"]["center"], [1, 0, 0], atol=1e-6)
    assert np.allclose(samples[-1]["params"]["center"], [3, 0, 0], atol=1e-6)
    assert all(s["kind"] == "point" for s in samples)


def test_classification_unknown_is_not_an_error():
    s = Session()
    coeffs = [0.0] * 32
    coeffs[0] = 1.0  # a scalar is no renderable object
    resp = ok(s, "create_from_coeffs", coeffs=coeffs)
    assert resp["objects"][0]["kind"] == "unknown"


def test_delete():
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[0, 0, 0], name="p")
    ok(s, "delete", name="p")
    assert ok(s, "list")["objects"] == []


def test_list_idempotent():
    s = Session()
    ok(s, "create_primitive", primitive="sphere", center=[0, 1, 0], radius=1.0)
    a = handle(s, {"proto": PROTOCOL_VERSION, "id": 7, "op": "list"})
    b = handle(s, {"proto": PROTOCOL_VERSION, "id": 7, "op": "list"})
    assert a == b


def test_service_adds_no_numeric_logic():
    # service output must equal direct module composition
    s = Session()
    ok(s, "create_primitive", primitive="point", position=[0.3, -0.7, 1.1], name="a")
    ok(s, "create_primitive", primitive="point", position=[1.5, 0.2, -0.4], name="b")
    resp = ok(s, "combine", operands=["a", "b"], wedge_inf=True)
    direct = embed_point([0.3, -0.7, 1.1]) ^ embed_point([1.5, 0.2, -0.4]) ^ e_inf
    assert list(resp["objects"][0]["coeffs"]) == [float(c) for c in direct.coeffs]
    assert resp["objects"][0]["kind"] == classify(direct).kind.value


# --- framing and transports -----------------------------------------------------


def test_framing_roundtrip():
    buf = io.BytesIO()
    payload = {"proto": PROTOCOL_VERSION, "id": 1, "op": "list", "text": "héllo"}
    write_message(buf, payload)
    buf.seek(0)
    assert read_message(buf) == payload
    assert read_message(buf) is None


def test_framing_rejects_garbage():
    buf = io.BytesIO(b"notanumber\n{}")
    with pytest.raises(ValueError):
        read_message(buf)
    buf = io.BytesIO(b"100\n{short}")
    with pytest.raises(ValueError):
        read_message(buf)


def test_socket_transport_session():
    server = PlaygroundServer(("127.0.0.1", 0), _Handler)
    port = server.server_address[1]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        with socket.create_connection(("127.0.0.1", port), timeout=5) as sock:
            rx = sock.makefile("rb")
            tx = sock.makefile("wb")
            write_message(tx, req("create_primitive", primitive="point",
                                  position=[1, 1, 1], name="p"))
            resp = read_message(rx)
            assert resp["status"] == "ok"
            assert resp["objects"][0]["kind"] == "point"
            write_message(tx, req("list"))
            resp = read_message(rx)
            assert len(resp["objects"]) == 1
    finally:
        server.shutdown()
        server.server_close()


def test_cli_stdio_transport_session():
    # full external interface: spawn the CLI in --stdio mode and run a session
    import subprocess
    import sys

    proc = subprocess.Popen(
        [sys.executable, "-m", "cgakit.cli", "playground", "--stdio"],
        stdin=subprocess.PIPE, stdout=subprocess.PIPE)
    try:
        def rpc(payload):
            data = json.dumps(payload).encode()
            proc.stdin.write(f"{len(data)}\n".encode())
            proc.stdin.write(data)
            proc.stdin.flush()
            header = b""
            while not header.endswith(b"\n"):
                header += proc.stdout.read(1)
            return json.loads(proc.stdout.read(int(header.strip())))

        resp = rpc(req("create_primitive", primitive="sphere",
                       center=[0, 0, 0], radius=1.0, name="s"))
        assert resp["status"] == "ok"
        assert resp["objects"][0]["kind"] == "sphere"
        resp = rpc(req("list"))
        assert len(resp["objects"]) == 1
    finally:
        proc.stdin.close()
        proc.wait(timeout=10)


def test_protocol_serialization_identity():
    # serialize -> parse is the identity for every message type
    messages = [
        req("create_primitive", primitive="point", position=[0, 0, 0]),
        req("create_from_coeffs", coeffs=[0.0] * 32),
        req("set_coefficient", name="x", index=3, value=1.5),
        req("combine", operands=["a", "b"], wedge_inf=True),
        req("dual", source="a"),
        req("deform", name="a", motor={"coeffs": [1.0] + [0.0] * 15}),
        req("interpolate", name="a",
            pose_a={"translation": [0, 0, 0], "rotation": [1, 0, 0, 0], "scale": 1},
            pose_b={"translation": [1, 0, 0], "rotation": [1, 0, 0, 0], "scale": 1}),
        req("list"),
        req("delete", name="a"),
        req("undo", name="a"),
    ]
    for msg in messages:
        assert json.loads(json.dumps(msg)) == msg
