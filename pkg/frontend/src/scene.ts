/**
 * Scene state: a mirror of service echoes, nothing more.
 *
 * Objects render exclusively from response records; the coefficient panel
 * always shows the 32 values the service last sent.  User actions map to
 * exactly one protocol request each; `SceneModel.actionRequest` is that
 * mapping, tested as data.
 */

import type { Kind, ObjectRecord, RequestPayload } from "./protocol.js";

export interface SceneObject {
  name: string;
  kind: Kind;
  grade: number;
  coeffs: number[];
  params: Record<string, unknown>;
  visible: boolean;
  color: string;
}

export type UserAction =
  | { type: "add-point"; position: [number, number, number]; name?: string }
  | { type: "add-sphere"; center: [number, number, number]; radius: number; name?: string }
  | { type: "add-plane"; normal: [number, number, number]; offset: number; name?: string }
  | { type: "edit-coefficient"; name: string; index: number; value: number }
  | { type: "wedge"; operands: string[]; withInfinity: boolean; name?: string }
  | { type: "dual"; source: string; name?: string }
  | { type: "deform"; name: string; pose: RequestPayload }
  | { type: "scrub"; name: string; poseA: RequestPayload; poseB: RequestPayload; samples: number }
  | { type: "undo"; name: string }
  | { type: "delete"; name: string }
  | { type: "refresh" };

const PALETTE = ["#4878cf", "#6acc65", "#d65f5f", "#b47cc7", "#c4ad66", "#77bedb"];

export class SceneModel {
  objects = new Map<string, SceneObject>();
  selection: string | null = null;
  private colorIndex = 0;

  /** The one-request-per-action protocol mapping. */
  actionRequest(action: UserAction): { op: string; payload: RequestPayload } {
    switch (action.type) {
      case "add-point":
        return { op: "create_primitive",
                 payload: { primitive: "point", position: action.position, name: action.name } };
      case "add-sphere":
        return { op: "create_primitive",
                 payload: { primitive: "sphere", center: action.center,
                            radius: action.radius, name: action.name } };
      case "add-plane":
        return { op: "create_primitive",
                 payload: { primitive: "plane", normal: action.normal,
                            offset: action.offset, name: action.name } };
      case "edit-coefficient":
        return { op: "set_coefficient",
                 payload: { name: action.name, index: action.index, value: action.value } };
      case "wedge":
        return { op: "combine",
                 payload: { operands: action.operands, wedge_inf: action.withInfinity,
                            name: action.name } };
      case "dual":
        return { op: "dual", payload: { source: action.source, name: action.name } };
      case "deform":
        return { op: "deform", payload: { name: action.name, motor: { pose: action.pose } } };
      case "scrub":
        return { op: "interpolate",
                 payload: { name: action.name, pose_a: action.poseA, pose_b: action.poseB,
                            samples: action.samples } };
      case "undo":
        return { op: "undo", payload: { name: action.name } };
      case "delete":
        return { op: "delete", payload: { name: action.name } };
      case "refresh":
        return { op: "list", payload: {} };
    }
  }

  /** Upsert every echoed object verbatim; returns the affected names. */
  applyRecords(records: ObjectRecord[] | undefined): string[] {
    if (!records) return [];
    const touched: string[] = [];
    for (const record of records) {
      const existing = this.objects.get(record.name);
      this.objects.set(record.name, {
        name: record.name,
        kind: record.kind,
        grade: record.grade,
        coeffs: [...record.coeffs],
        params: record.params,
        visible: existing?.visible ?? true,
        color: existing?.color ?? this.nextColor(),
      });
      touched.push(record.name);
    }
    return touched;
  }

  replaceAll(records: ObjectRecord[] | undefined): void {
    const keep = new Set((records ?? []).map((r) => r.name));
    for (const name of [...this.objects.keys()]) {
      if (!keep.has(name)) this.objects.delete(name);
    }
    this.applyRecords(records);
  }

  remove(name: string): void {
    this.objects.delete(name);
    if (this.selection === name) this.selection = null;
  }

  select(name: string | null): void {
    this.selection = name !== null && this.objects.has(name) ? name : null;
  }

  get selected(): SceneObject | null {
    return this.selection ? this.objects.get(this.selection) ?? null : null;
  }

  private nextColor(): string {
    return PALETTE[this.colorIndex++ % PALETTE.length];
  }
}

/** 50 ms trailing debounce used by the coefficient editor. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 50,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(...args);
    }, waitMs);
  };
}
