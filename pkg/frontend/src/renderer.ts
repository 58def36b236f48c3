// DOM renderer: draws the interface spec to scale and decorates it with
// the live state. Renders only what the view model holds.

import type { PanelClient } from "./client.js";
import type { SpecMessage, ZoneSpec } from "./protocol.js";
import type { PanelState } from "./viewmodel.js";

const BOARD_MAX_W = 720;
const BOARD_MAX_H = 540;

export class PanelRenderer {
  private board!: HTMLDivElement;
  private cursorEl!: HTMLDivElement;
  private statusEl!: HTMLSpanElement;
  private bufferEl!: HTMLPreElement;
  private timingEl!: HTMLDivElement;
  private errorEl!: HTMLDivElement;
  private ackEl!: HTMLSpanElement;
  private pageSelect!: HTMLSelectElement;
  private zoneEls = new Map<string, HTMLDivElement>();
  private renderedSpec: SpecMessage | null = null;
  private renderedPage = "";
  private scale = 1;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: PanelClient,
  ) {
    this.buildChrome();
    client.viewModel.subscribe((state) => this.render(state));
  }

  private buildChrome(): void {
    this.root.innerHTML = "";
    this.root.classList.add("panel");

    const bar = el("div", "toolbar");
    this.statusEl = el("span", "status");
    bar.appendChild(this.statusEl);

    this.pageSelect = document.createElement("select");
    this.pageSelect.className = "page-select";
    this.pageSelect.onchange = () =>
      this.client.sendCommand("goto_page", { page: this.pageSelect.value });
    bar.appendChild(this.pageSelect);

    const mapping = document.createElement("select");
    mapping.className = "mapping-select";
    for (const mode of ["absolute", "linear", "nonlinear"]) {
      const opt = document.createElement("option");
      opt.value = mode;
      opt.textContent = `mapping: ${mode}`;
      mapping.appendChild(opt);
    }
    mapping.onchange = () =>
      this.client.sendCommand("set_mapping_mode", { mode: mapping.value });
    bar.appendChild(mapping);

    const recal = document.createElement("button");
    recal.textContent = "recalibrate";
    recal.onclick = () => this.client.sendCommand("recalibrate");
    bar.appendChild(recal);

    const key = document.createElement("input");
    key.placeholder = "param key";
    key.className = "param-key";
    const value = document.createElement("input");
    value.placeholder = "value";
    value.className = "param-value";
    const apply = document.createElement("button");
    apply.textContent = "set";
    apply.onclick = () =>
      this.client.sendCommand("set_param", { key: key.value, value: value.value });
    bar.append(key, value, apply);

    this.ackEl = el("span", "ack");
    bar.appendChild(this.ackEl);
    this.root.appendChild(bar);

    this.errorEl = el("div", "error");
    this.root.appendChild(this.errorEl);

    this.board = el("div", "board");
    this.cursorEl = el("div", "cursor");
    this.board.appendChild(this.cursorEl);
    this.root.appendChild(this.board);

    this.bufferEl = document.createElement("pre");
    this.bufferEl.className = "buffer";
    this.root.appendChild(this.bufferEl);

    this.timingEl = el("div", "timing");
    this.root.appendChild(this.timingEl);
  }

  private rebuildBoard(spec: SpecMessage, page: string): void {
    for (const zoneEl of this.zoneEls.values()) zoneEl.remove();
    this.zoneEls.clear();

    // affine scale, aspect preserved
    this.scale = Math.min(BOARD_MAX_W / spec.width, BOARD_MAX_H / spec.height);
    this.board.style.width = `${Math.round(spec.width * this.scale)}px`;
    this.board.style.height = `${Math.round(spec.height * this.scale)}px`;

    const pageSpec = spec.pages.find((p) => p.id === page);
    for (const zone of pageSpec?.zones ?? []) {
      const zoneEl = el("div", "zone");
      zoneEl.dataset.zone = zone.id;
      zoneEl.dataset.action = zone.action;
      this.placeZone(zoneEl, zone);
      zoneEl.textContent = zone.label;
      this.board.appendChild(zoneEl);
      this.zoneEls.set(zone.id, zoneEl);
    }

    this.pageSelect.innerHTML = "";
    for (const id of spec.page_order) {
      const opt = document.createElement("option");
      opt.value = id;
      opt.textContent = `page: ${id}`;
      this.pageSelect.appendChild(opt);
    }
    this.pageSelect.value = page;
    this.renderedSpec = spec;
    this.renderedPage = page;
  }

  private placeZone(zoneEl: HTMLDivElement, zone: ZoneSpec): void {
    zoneEl.style.left = `${zone.x * this.scale}px`;
    zoneEl.style.top = `${zone.y * this.scale}px`;
    zoneEl.style.width = `${zone.w * this.scale}px`;
    zoneEl.style.height = `${zone.h * this.scale}px`;
  }

  private render(state: PanelState): void {
    this.statusEl.textContent = state.connection;
    this.statusEl.dataset.connection = state.connection;

    if (state.spec && (state.spec !== this.renderedSpec || state.page !== this.renderedPage)) {
      this.rebuildBoard(state.spec, state.page);
    }

    for (const [id, zoneEl] of this.zoneEls) {
      zoneEl.classList.toggle("hovered", id === state.hoveredZone);
      zoneEl.classList.toggle("pressed", id === state.pressedZone);
      zoneEl.classList.toggle("flash", id === state.flashZone);
    }

    if (state.cursor) {
      this.cursorEl.style.display = "block";
      this.cursorEl.style.left = `${state.cursor.x * this.scale}px`;
      this.cursorEl.style.top = `${state.cursor.y * this.scale}px`;
      this.cursorEl.classList.toggle("down", state.cursor.pressed);
    } else {
      this.cursorEl.style.display = "none";
    }

    this.bufferEl.textContent = state.textBuffer;
    this.errorEl.textContent = state.lastError ?? "";
    this.ackEl.textContent = state.lastAck
      ? `${state.lastAck.command}: ${state.lastAck.ok ? "ok" : "rejected"}`
      : "";
    const total = state.stages["total"];
    this.timingEl.textContent =
      state.frame >= 0 && total !== undefined
        ? `frame ${state.frame}  ${total.toFixed(1)} ms/frame`
        : "";
  }
}

function el(tag: "div", className: string): HTMLDivElement;
function el(tag: "span", className: string): HTMLSpanElement;
function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}
