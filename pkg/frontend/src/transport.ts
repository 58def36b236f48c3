// Message transport with reconnect. The browser uses the WebSocket
// implementation; tests drive the client through a fake.

export interface TransportEvents {
  onOpen(): void;
  onMessage(raw: string): void;
  onClose(): void;
}

export interface Transport {
  send(raw: string): void;
  close(): void;
}

export type TransportFactory = (url: string, events: TransportEvents) => Transport;

export const webSocketTransport: TransportFactory = (url, events) => {
  const ws = new WebSocket(url);
  ws.onopen = () => events.onOpen();
  ws.onmessage = (ev) => events.onMessage(String(ev.data));
  ws.onclose = () => events.onClose();
  ws.onerror = () => {
    /* the close event follows and drives the reconnect */
  };
  return {
    send: (raw) => ws.send(raw),
    close: () => ws.close(),
  };
};

export interface ReconnectOptions {
  initialDelayMs?: number;
  maxDelayMs?: number;
  setTimeoutFn?: typeof setTimeout;
  clearTimeoutFn?: typeof clearTimeout;
}

// Wraps a factory so the connection re-establishes with exponential
// backoff; the delay resets once a connection opens.
export function withReconnect(
  factory: TransportFactory,
  opts: ReconnectOptions = {},
): TransportFactory {
  const initial = opts.initialDelayMs ?? 500;
  const max = opts.maxDelayMs ?? 8000;
  const setT = opts.setTimeoutFn ?? setTimeout;
  const clearT = opts.clearTimeoutFn ?? clearTimeout;

  return (url, events) => {
    let delay = initial;
    let stopped = false;
    let inner: Transport | null = null;
    let timer: ReturnType<typeof setTimeout> | null = null;

    const start = () => {
      if (stopped) return;
      inner = factory(url, {
        onOpen: () => {
          delay = initial;
          events.onOpen();
        },
        onMessage: (raw) => events.onMessage(raw),
        onClose: () => {
          inner = null;
          events.onClose();
          if (!stopped) {
            timer = setT(start, delay);
            delay = Math.min(delay * 2, max);
          }
        },
      });
    };
    start();

    return {
      send: (raw) => inner?.send(raw),
      close: () => {
        stopped = true;
        if (timer !== null) clearT(timer);
        inner?.close();
      },
    };
  };
}
