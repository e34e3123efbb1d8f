/**
 * Browser entry: three.js viewport plus the playground panel, talking to the
 * service through a WebSocket bridge (see bridge.mjs).  Address comes from
 * the ?ws= query parameter, default ws://localhost:7445.
 */

import * as THREE from "three";

import { PlaygroundClient, WebSocketTransport, type PlaygroundResponse } from "./protocol.js";
import { renderObject } from "./render.js";
import { PlaygroundPanel, readPose } from "./ui.js";

function connect(): PlaygroundClient {
  const url = new URLSearchParams(location.search).get("ws") ?? "ws://localhost:7445";
  return new PlaygroundClient(new WebSocketTransport(new WebSocket(url)));
}

function main(): void {
  const client = connect();

  const scene = new THREE.Scene();
  scene.background = new THREE.Color("#10131a");
  const camera = new THREE.PerspectiveCamera(55, innerWidth / innerHeight, 0.01, 500);
  camera.position.set(4, 3, 6);
  camera.lookAt(0, 0, 0);
  const renderer = new THREE.WebGLRenderer({ antialias: true });
  renderer.setSize(innerWidth, innerHeight);
  document.querySelector("#viewport")!.appendChild(renderer.domElement);
  scene.add(new THREE.AxesHelper(2));
  scene.add(new THREE.GridHelper(10, 10, 0x334, 0x223));

  const objectLayer = new THREE.Group();
  scene.add(objectLayer);
  const previewLayer = new THREE.Group();
  scene.add(previewLayer);

  const panel = new PlaygroundPanel(client, document.querySelector("#panel")!, {
    onObjectsChanged() {
      objectLayer.clear();
      for (const obj of panel.model.objects.values()) {
        objectLayer.add(renderObject(obj));
      }
    },
    onSamples(resp: PlaygroundResponse) {
      lastSamples = resp.samples ?? [];
      showSample(Number(scrub.value));
    },
  });

  let lastSamples: NonNullable<PlaygroundResponse["samples"]> = [];
  const scrub = document.querySelector("#scrubber") as HTMLInputElement;

  function showSample(alpha: number): void {
    previewLayer.clear();
    if (lastSamples.length === 0) return;
    const idx = Math.min(
      lastSamples.length - 1,
      Math.round(alpha * (lastSamples.length - 1)),
    );
    const sample = lastSamples[idx];
    previewLayer.add(
      renderObject({
        name: "preview",
        kind: sample.kind,
        grade: sample.grade,
        coeffs: sample.coeffs,
        params: sample.params,
        visible: true,
        color: "#ffd24d",
      }),
    );
  }

  scrub.addEventListener("input", () => showSample(Number(scrub.value)));

  document.querySelector("#add-point")!.addEventListener("click", () => {
    const at = readPose("pose-a", document.body).translation;
    void panel.dispatch({ type: "add-point", position: at });
  });
  document.querySelector("#wedge")!.addEventListener("click", () => {
    const names = [...panel.model.objects.keys()].slice(-2);
    if (names.length === 2) {
      void panel.dispatch({ type: "wedge", operands: names, withInfinity: true });
    }
  });
  document.querySelector("#interpolate")!.addEventListener("click", () => {
    const name = panel.model.selection;
    if (name === null) return;
    void panel.dispatch({
      type: "scrub",
      name,
      poseA: readPose("pose-a", document.body) as unknown as Record<string, unknown>,
      poseB: readPose("pose-b", document.body) as unknown as Record<string, unknown>,
      samples: 60,
    });
  });

  void panel.dispatch({ type: "refresh" });

  function frame(): void {
    requestAnimationFrame(frame);
    renderer.render(scene, camera);
  }
  frame();
}

main();
