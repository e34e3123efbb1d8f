/**
 * Classified object -> three.js node.  Geometry comes entirely from the
 * service's render parameters; unknown objects get a labeled placeholder
 * glyph carrying the raw coefficients in userData for the tooltip.
 */

import * as THREE from "three";

import type { SceneObject } from "./scene.js";

const LINE_EXTENT = 20; // world units drawn either side of the anchor point

function vec3(value: unknown): THREE.Vector3 {
  const [x, y, z] = value as [number, number, number];
  return new THREE.Vector3(x, y, z);
}

function marker(position: THREE.Vector3, color: string, size = 0.06): THREE.Mesh {
  const mesh = new THREE.Mesh(
    new THREE.SphereGeometry(size, 12, 8),
    new THREE.MeshBasicMaterial({ color }),
  );
  mesh.position.copy(position);
  return mesh;
}

/** Rotate +Z onto `normal` for discs/rings/quads. */
function orientToNormal(node: THREE.Object3D, normal: THREE.Vector3): void {
  const quat = new THREE.Quaternion().setFromUnitVectors(
    new THREE.Vector3(0, 0, 1),
    normal.clone().normalize(),
  );
  node.quaternion.copy(quat);
}

export function renderObject(obj: SceneObject): THREE.Object3D {
  const node = buildNode(obj);
  node.name = obj.name;
  node.visible = obj.visible;
  node.userData.kind = obj.kind;
  node.userData.coeffs = obj.coeffs;
  return node;
}

function buildNode(obj: SceneObject): THREE.Object3D {
  const color = obj.color;
  const p = obj.params;
  switch (obj.kind) {
    case "point":
      return marker(vec3(p.center), color);
    case "sphere": {
      const mesh = new THREE.Mesh(
        new THREE.SphereGeometry(p.radius as number, 24, 16),
        new THREE.MeshBasicMaterial({ color, wireframe: true }),
      );
      mesh.position.copy(vec3(p.center));
      return mesh;
    }
    case "plane": {
      const quad = new THREE.Mesh(
        new THREE.PlaneGeometry(LINE_EXTENT, LINE_EXTENT),
        new THREE.MeshBasicMaterial({
          color,
          transparent: true,
          opacity: 0.25,
          side: THREE.DoubleSide,
        }),
      );
      const normal = vec3(p.normal);
      orientToNormal(quad, normal);
      quad.position.copy(normal.clone().multiplyScalar(p.offset as number));
      return quad;
    }
    case "line": {
      const anchor = vec3(p.point);
      const dir = vec3(p.direction).normalize();
      const a = anchor.clone().addScaledVector(dir, -LINE_EXTENT);
      const b = anchor.clone().addScaledVector(dir, LINE_EXTENT);
      const geom = new THREE.BufferGeometry().setFromPoints([a, b]);
      return new THREE.Line(geom, new THREE.LineBasicMaterial({ color }));
    }
    case "circle": {
      const curve = new THREE.EllipseCurve(0, 0, p.radius as number, p.radius as number);
      const pts = curve.getPoints(64).map((v) => new THREE.Vector3(v.x, v.y, 0));
      const ring = new THREE.LineLoop(
        new THREE.BufferGeometry().setFromPoints(pts),
        new THREE.LineBasicMaterial({ color }),
      );
      orientToNormal(ring, vec3(p.normal));
      ring.position.copy(vec3(p.center));
      return ring;
    }
    case "point_pair": {
      const group = new THREE.Group();
      const [first, second] = p.points as [unknown, unknown];
      group.add(marker(vec3(first), color));
      group.add(marker(vec3(second), color));
      return group;
    }
    default: {
      // imaginary rounds and unclassifiable blades: placeholder glyph
      const glyph = new THREE.Mesh(
        new THREE.OctahedronGeometry(0.12),
        new THREE.MeshBasicMaterial({ color: "#888888", wireframe: true }),
      );
      if (p.center) glyph.position.copy(vec3(p.center));
      glyph.userData.placeholder = true;
      return glyph;
    }
  }
}
