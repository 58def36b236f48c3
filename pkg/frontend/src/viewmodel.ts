// Pure state machine over the gateway stream: every piece of rendered
// state comes from messages, never from locally simulated pipeline logic,
// so replaying a recorded log reproduces the exact final state.

import type {
  CommandAckMessage,
  OrderExecutedMessage,
  ServerMessage,
  SpecMessage,
} from "./protocol.js";

export type Connection = "connecting" | "connected" | "disconnected";

export interface PanelState {
  connection: Connection;
  spec: SpecMessage | null;
  page: string;
  cursor: { x: number; y: number; pressed: boolean } | null;
  hoveredZone: string | null;
  pressedZone: string | null;
  flashZone: string | null;
  textBuffer: string;
  lastOrder: OrderExecutedMessage | null;
  lastAck: CommandAckMessage | null;
  lastError: string | null;
  frame: number;
  stages: Record<string, number>;
  seqGaps: number;
}

function initialState(): PanelState {
  return {
    connection: "connecting",
    spec: null,
    page: "",
    cursor: null,
    hoveredZone: null,
    pressedZone: null,
    flashZone: null,
    textBuffer: "",
    lastOrder: null,
    lastAck: null,
    lastError: null,
    frame: -1,
    stages: {},
    seqGaps: 0,
  };
}

export class ViewModel {
  private s: PanelState = initialState();
  private lastSeq = 0;
  private listeners: Array<(state: PanelState) => void> = [];

  get state(): Readonly<PanelState> {
    return this.s;
  }

  subscribe(listener: (state: PanelState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.s);
  }

  markConnecting(): void {
    this.s.connection = "connecting";
    this.emit();
  }

  markDisconnected(): void {
    this.s.connection = "disconnected";
    this.s.cursor = null;
    this.s.hoveredZone = null;
    this.s.pressedZone = null;
    this.lastSeq = 0; // the server restarts sequences per connection
    this.emit();
  }

  apply(msg: ServerMessage): void {
    if ("seq" in msg && typeof msg.seq === "number") {
      if (this.lastSeq && msg.seq > this.lastSeq + 1) {
        this.s.seqGaps += msg.seq - this.lastSeq - 1;
      }
      this.lastSeq = msg.seq;
    }
    switch (msg.type) {
      case "hello":
        this.s.connection = "connected";
        break;
      case "spec":
        this.s.spec = msg;
        this.s.page = msg.page || msg.start;
        this.s.hoveredZone = null;
        this.s.pressedZone = null;
        break;
      case "cursor":
        this.s.cursor = { x: msg.x, y: msg.y, pressed: msg.pressed };
        this.setPage(msg.page);
        break;
      case "zone_event":
        this.setPage(msg.page);
        if (msg.event === "enter") this.s.hoveredZone = msg.zone;
        else if (this.s.hoveredZone === msg.zone) this.s.hoveredZone = null;
        break;
      case "click_event":
        this.setPage(msg.page);
        if (msg.edge === "down") this.s.pressedZone = msg.zone;
        else this.s.pressedZone = null;
        break;
      case "order_executed":
        this.s.lastOrder = msg;
        this.s.flashZone = this.s.pressedZone ?? this.s.hoveredZone;
        break;
      case "text_buffer":
        this.s.textBuffer = msg.text;
        break;
      case "timing":
        this.s.frame = msg.frame;
        this.s.stages = msg.stages;
        break;
      case "command_ack":
        this.s.lastAck = msg;
        this.s.lastError = msg.ok ? null : (msg.error ?? "command failed");
        break;
    }
    this.emit();
  }

  private setPage(page: string): void {
    if (page !== this.s.page) {
      this.s.page = page;
      this.s.hoveredZone = null;
      this.s.flashZone = null;
    }
  }

  // Stable textual rendering of everything the panel shows; replay tests
  // compare these strings between runs.
  renderText(): string {
    const s = this.s;
    const cursor = s.cursor
      ? `${s.cursor.x.toFixed(1)},${s.cursor.y.toFixed(1)}${s.cursor.pressed ? " pressed" : ""}`
      : "-";
    const order = s.lastOrder
      ? `${s.lastOrder.name}(${s.lastOrder.p1},${s.lastOrder.p2})`
      : "-";
    return [
      `connection: ${s.connection}`,
      `interface: ${s.spec ? s.spec.name : "-"}`,
      `page: ${s.page || "-"}`,
      `cursor: ${cursor}`,
      `hovered: ${s.hoveredZone ?? "-"}`,
      `pressed: ${s.pressedZone ?? "-"}`,
      `buffer: ${JSON.stringify(s.textBuffer)}`,
      `last order: ${order}`,
      `frame: ${s.frame}`,
    ].join("\n");
  }
}
