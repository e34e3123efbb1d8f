/**
 * Thin DOM layer: object list, 32-slot coefficient editor, pose inputs, and
 * the interpolation scrubber.  Every handler funnels through
 * `SceneModel.actionRequest` and re-renders from the service echo; on errors
 * the panel rolls back to the last echoed state and shows a toast.
 */

import type { PlaygroundClient, PlaygroundResponse, PosePayload } from "./protocol.js";
import { SceneModel, debounce, type UserAction } from "./scene.js";

export interface UiHooks {
  onObjectsChanged(): void;
  onSamples(resp: PlaygroundResponse): void;
}

export class PlaygroundPanel {
  readonly model = new SceneModel();
  private coeffInputs: HTMLInputElement[] = [];

  constructor(
    private client: PlaygroundClient,
    private root: HTMLElement,
    private hooks: UiHooks,
  ) {
    this.buildDom();
  }

  async dispatch(action: UserAction): Promise<PlaygroundResponse | null> {
    const { op, payload } = this.model.actionRequest(action);
    try {
      const resp = await this.client.call(op, payload);
      if (action.type === "delete") {
        this.model.remove(action.name);
      } else if (action.type === "refresh") {
        this.model.replaceAll(resp.objects);
      } else {
        this.model.applyRecords(resp.objects);
      }
      if (resp.samples) this.hooks.onSamples(resp);
      this.refreshPanel();
      this.hooks.onObjectsChanged();
      return resp;
    } catch (err) {
      this.toast(String(err));
      this.refreshPanel(); // roll back inputs to the last echo
      return null;
    }
  }

  /** Redraw the object list and the coefficient editor from model state. */
  refreshPanel(): void {
    const list = this.root.querySelector("#object-list")!;
    list.innerHTML = "";
    for (const obj of this.model.objects.values()) {
      const row = document.createElement("li");
      row.textContent = `${obj.name} [${obj.kind}]`;
      row.style.color = obj.color;
      if (obj.name === this.model.selection) row.classList.add("selected");
      row.addEventListener("click", () => {
        this.model.select(obj.name);
        this.refreshPanel();
      });
      list.appendChild(row);
    }
    const selected = this.model.selected;
    this.coeffInputs.forEach((input, index) => {
      input.value = selected ? String(selected.coeffs[index]) : "";
      input.disabled = !selected;
    });
  }

  private buildDom(): void {
    this.root.innerHTML = `
      <ul id="object-list"></ul>
      <div id="coeff-grid"></div>
      <div id="toast" hidden></div>
    `;
    const grid = this.root.querySelector("#coeff-grid")!;
    const sendEdit = debounce((index: number, value: number) => {
      const name = this.model.selection;
      if (name === null) return;
      void this.dispatch({ type: "edit-coefficient", name, index, value });
    }, 50);
    for (let i = 0; i < 32; i++) {
      const input = document.createElement("input");
      input.type = "number";
      input.step = "0.1";
      input.title = `coefficient ${i}`;
      input.addEventListener("input", () => {
        const value = Number(input.value);
        if (!Number.isFinite(value)) return; // reject locally, no request
        sendEdit(i, value);
      });
      grid.appendChild(input);
      this.coeffInputs.push(input);
    }
  }

  private toast(message: string): void {
    const el = this.root.querySelector("#toast") as HTMLElement;
    el.textContent = message;
    el.hidden = false;
    setTimeout(() => {
      el.hidden = true;
    }, 2500);
  }
}

export function readPose(prefix: string, root: HTMLElement): PosePayload {
  const val = (id: string) =>
    Number((root.querySelector(`#${prefix}-${id}`) as HTMLInputElement).value);
  return {
    translation: [val("tx"), val("ty"), val("tz")],
    rotation: [val("qw"), val("qx"), val("qy"), val("qz")],
    scale: val("s"),
  };
}
