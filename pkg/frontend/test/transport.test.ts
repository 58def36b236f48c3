import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { Transport, TransportEvents } from "../src/transport.js";
import { withReconnect } from "../src/transport.js";
import { PanelClient } from "../src/client.js";
import { ViewModel } from "../src/viewmodel.js";

class FlakyFactory {
  attempts = 0;
  current: TransportEvents | null = null;

  factory = (_url: string, events: TransportEvents): Transport => {
    this.attempts += 1;
    this.current = events;
    return { send: () => {}, close: () => events.onClose() };
  };

  dropConnection(): void {
    this.current?.onClose();
  }
}

describe("withReconnect", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("reconnects with exponential backoff and resets after onOpen", () => {
    const flaky = new FlakyFactory();
    const factory = withReconnect(flaky.factory, { initialDelayMs: 100, maxDelayMs: 400 });
    factory("ws://x/", { onOpen: () => {}, onMessage: () => {}, onClose: () => {} });
    expect(flaky.attempts).toBe(1);

    flaky.dropConnection();
    vi.advanceTimersByTime(99);
    expect(flaky.attempts).toBe(1);
    vi.advanceTimersByTime(1);
    expect(flaky.attempts).toBe(2);

    flaky.dropConnection();               // second failure: 200 ms
    vi.advanceTimersByTime(199);
    expect(flaky.attempts).toBe(2);
    vi.advanceTimersByTime(1);
    expect(flaky.attempts).toBe(3);

    flaky.dropConnection();               // third: 400 ms (capped)
    vi.advanceTimersByTime(400);
    expect(flaky.attempts).toBe(4);

    flaky.current?.onOpen();              // success resets the delay
    flaky.dropConnection();
    vi.advanceTimersByTime(100);
    expect(flaky.attempts).toBe(5);
  });

  it("close() stops reconnecting", () => {
    const flaky = new FlakyFactory();
    const factory = withReconnect(flaky.factory, { initialDelayMs: 100 });
    const handle = factory("ws://x/", {
      onOpen: () => {}, onMessage: () => {}, onClose: () => {},
    });
    handle.close();
    vi.advanceTimersByTime(10_000);
    expect(flaky.attempts).toBe(1);
  });

  it("the view model shows disconnected between attempts", () => {
    const flaky = new FlakyFactory();
    const vm = new ViewModel();
    const client = new PanelClient(
      vm, withReconnect(flaky.factory, { initialDelayMs: 100 }));
    client.connect("ws://x/");
    flaky.current?.onOpen();
    flaky.current?.onMessage(JSON.stringify({ type: "hello", version: 1 }));
    expect(vm.state.connection).toBe("connected");

    flaky.dropConnection();
    expect(vm.state.connection).toBe("disconnected");

    vi.advanceTimersByTime(100);
    flaky.current?.onMessage(JSON.stringify({ type: "hello", version: 1 }));
    expect(vm.state.connection).toBe("connected");
  });
});
