// Gateway message types, mirroring docs/protocol.md. Field names are the
// wire contract; keep them in sync with the Python side's golden tests.

export interface ZoneSpec {
  id: string;
  x: number;
  y: number;
  w: number;
  h: number;
  label: string;
  action: string;
  p1: number;
  p2: number;
}

export interface PageSpec {
  id: string;
  zones: ZoneSpec[];
}

export interface HelloMessage {
  type: "hello";
  version: number;
}

export interface SpecMessage {
  type: "spec";
  seq: number;
  name: string;
  width: number;
  height: number;
  start: string;
  page: string;
  page_order: string[];
  pages: PageSpec[];
}

export interface CursorMessage {
  type: "cursor";
  seq: number;
  x: number;
  y: number;
  pressed: boolean;
  page: string;
}

export interface ZoneEventMessage {
  type: "zone_event";
  seq: number;
  event: "enter" | "leave";
  zone: string;
  page: string;
}

export interface ClickEventMessage {
  type: "click_event";
  seq: number;
  edge: "down" | "up";
  zone: string | null;
  page: string;
}

export interface OrderExecutedMessage {
  type: "order_executed";
  seq: number;
  action: number;
  p1: number;
  p2: number;
  name: string;
}

export interface TextBufferMessage {
  type: "text_buffer";
  seq: number;
  text: string;
}

export interface TimingMessage {
  type: "timing";
  seq: number;
  frame: number;
  stages: Record<string, number>;
}

export interface CommandAckMessage {
  type: "command_ack";
  seq: number;
  ok: boolean;
  command: string | null;
  error: string | null;
}

export type ServerMessage =
  | HelloMessage
  | SpecMessage
  | CursorMessage
  | ZoneEventMessage
  | ClickEventMessage
  | OrderExecutedMessage
  | TextBufferMessage
  | TimingMessage
  | CommandAckMessage;

export type CommandName =
  | "goto_page"
  | "set_mapping_mode"
  | "set_param"
  | "load_interface"
  | "recalibrate"
  | "stop";

export interface CommandMessage {
  type: "command";
  command: CommandName;
  args?: Record<string, string>;
}

export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const type = (data as { type?: unknown }).type;
  if (typeof type !== "string") return null;
  return data as ServerMessage;
}
