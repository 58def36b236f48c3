"""Live state streaming to UI clients over WebSocket, plus operator commands.

One JSON object per text frame.  After the socket upgrade the server sends
{"type":"hello","version":1}, then a spec snapshot, then per-frame messages
(cursor, zone_event, click_event, order_executed, text_buffer, timing).
Every message after hello carries a per-connection seq that only increases;
under backpressure droppable messages are discarded whole, so clients may
see gaps but never reordering.  Clients send operator commands:

    {"type":"command","command":"goto_page","args":{"page":"digits"}}

which the pipeline applies between frames and acknowledges with a
command_ack.  Field names are frozen; see docs/protocol.md.
"""
from __future__ import annotations

import base64
import hashlib
import json
import os
import socket
import struct
import threading

from .engine import ActionType

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
PROTOCOL_VERSION = 1
MAX_QUEUED = 1024

_TEXT = 0x1
_CLOSE = 0x8
_PING = 0x9
_PONG = 0xA


def encode_json(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=True)


# ------------------------------------------------------------ wire frames

def encode_frame(payload: bytes, opcode: int = _TEXT, mask: bool = False) -> bytes:
    head = bytearray([0x80 | opcode])
    n = len(payload)
    mask_bit = 0x80 if mask else 0
    if n < 126:
        head.append(mask_bit | n)
    elif n < 1 << 16:
        head.append(mask_bit | 126)
        head += struct.pack(">H", n)
    else:
        head.append(mask_bit | 127)
        head += struct.pack(">Q", n)
    if mask:
        key = os.urandom(4)
        head += key
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return bytes(head) + payload


def _read_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("socket closed")
        buf += chunk
    return buf


def read_frame(sock: socket.socket) -> tuple[int, bytes]:
    """Read one complete frame, reassembling nothing (no fragmentation)."""
    b0, b1 = _read_exact(sock, 2)
    opcode = b0 & 0x0F
    masked = bool(b1 & 0x80)
    n = b1 & 0x7F
    if n == 126:
        (n,) = struct.unpack(">H", _read_exact(sock, 2))
    elif n == 127:
        (n,) = struct.unpack(">Q", _read_exact(sock, 8))
    key = _read_exact(sock, 4) if masked else None
    payload = _read_exact(sock, n) if n else b""
    if key:
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return opcode, payload


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + WS_GUID).encode()).digest()
    return base64.b64encode(digest).decode()


# ------------------------------------------------------------ connections

class ClientConnection:
    """One connected UI client with its own seq counter and send queue."""

    def __init__(self, sock: socket.socket, addr, on_command, on_close):
        self.sock = sock
        self.addr = addr
        self._on_command = on_command
        self._on_close = on_close
        self._seq = 0
        self.last_text_sent: str | None = None
        self._queue: list[bytes] = []
        self._lock = threading.Lock()
        self._ready = threading.Condition(self._lock)
        self._closed = False
        self.dropped = 0

    def start(self):
        threading.Thread(target=self._writer, daemon=True,
                         name=f"gw-write-{self.addr}").start()
        threading.Thread(target=self._reader, daemon=True,
                         name=f"gw-read-{self.addr}").start()

    def send_raw(self, text: str, droppable: bool = False):
        data = encode_frame(text.encode("utf-8"))
        with self._lock:
            if self._closed:
                return
            if droppable and len(self._queue) >= MAX_QUEUED:
                self.dropped += 1
                return
            self._queue.append(data)
            self._ready.notify()

    def send_message(self, msg_type: str, payload: dict, droppable: bool = True):
        """Attach the next seq and enqueue; gaps appear if dropped later."""
        with self._lock:
            if self._closed:
                return
            self._seq += 1
            seq = self._seq
        body = {"type": msg_type, "seq": seq}
        body.update(payload)
        self.send_raw(encode_json(body), droppable=droppable)

    def send_hello(self):
        self.send_raw(encode_json({"type": "hello", "version": PROTOCOL_VERSION}),
                      droppable=False)

    def _writer(self):
        try:
            while True:
                with self._lock:
                    while not self._queue and not self._closed:
                        self._ready.wait(timeout=1.0)
                    if self._closed and not self._queue:
                        return
                    data = self._queue.pop(0) if self._queue else None
                if data:
                    self.sock.sendall(data)
        except OSError:
            pass
        finally:
            self.close()

    def _reader(self):
        try:
            while True:
                opcode, payload = read_frame(self.sock)
                if opcode == _CLOSE:
                    break
                if opcode == _PING:
                    self.sock.sendall(encode_frame(payload, opcode=_PONG))
                    continue
                if opcode != _TEXT:
                    continue
                try:
                    obj = json.loads(payload.decode("utf-8"))
                    if not isinstance(obj, dict):
                        raise ValueError("message must be a JSON object")
                except (ValueError, UnicodeDecodeError) as exc:
                    self.send_message("command_ack",
                                      {"ok": False, "command": None,
                                       "error": f"malformed message: {exc}"},
                                      droppable=False)
                    continue
                self._on_command(self, obj)
        except (ConnectionError, OSError):
            pass
        finally:
            self.close()

    def close(self):
        with self._lock:
            if self._closed:
                return
            self._closed = True
            self._ready.notify_all()
        try:
            self.sock.close()
        except OSError:
            pass
        self._on_close(self)


class GatewayServer:
    """Accepts WebSocket clients; greeting and commands are delegated."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 on_client=None, on_command=None):
        self.host = host
        self._requested_port = port
        self.on_client = on_client or (lambda conn: None)
        self.on_command = on_command or (lambda conn, obj: None)
        self._clients: list[ClientConnection] = []
        self._lock = threading.Lock()
        self._listener: socket.socket | None = None
        self._stopping = False
        self.port = port

    def start(self):
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.host, self._requested_port))
        listener.listen(8)
        self._listener = listener
        self.port = listener.getsockname()[1]
        threading.Thread(target=self._accept_loop, daemon=True,
                         name="gw-accept").start()
        return self

    def _accept_loop(self):
        while not self._stopping:
            try:
                sock, addr = self._listener.accept()
            except OSError:
                return
            threading.Thread(target=self._handshake, args=(sock, addr),
                             daemon=True, name="gw-handshake").start()

    def _handshake(self, sock: socket.socket, addr):
        try:
            sock.settimeout(5.0)
            request = b""
            while b"\r\n\r\n" not in request:
                chunk = sock.recv(4096)
                if not chunk:
                    raise ConnectionError("client left during handshake")
                request += chunk
            headers = {}
            for line in request.split(b"\r\n")[1:]:
                if b":" in line:
                    k, v = line.split(b":", 1)
                    headers[k.strip().lower().decode()] = v.strip().decode()
            key = headers.get("sec-websocket-key")
            if key is None or "websocket" not in headers.get("upgrade", "").lower():
                sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
                sock.close()
                return
            response = (
                "HTTP/1.1 101 Switching Protocols\r\n"
                "Upgrade: websocket\r\n"
                "Connection: Upgrade\r\n"
                f"Sec-WebSocket-Accept: {accept_key(key)}\r\n"
                "\r\n"
            )
            sock.sendall(response.encode())
            sock.settimeout(None)
        except OSError:
            try:
                sock.close()
            except OSError:
                pass
            return
        conn = ClientConnection(sock, addr, self.on_command, self._forget)
        with self._lock:
            self._clients.append(conn)
        conn.start()
        self.on_client(conn)

    def _forget(self, conn):
        with self._lock:
            if conn in self._clients:
                self._clients.remove(conn)

    def clients(self) -> list[ClientConnection]:
        with self._lock:
            return list(self._clients)

    def broadcast(self, msg_type: str, payload: dict, droppable: bool = True):
        for conn in self.clients():
            conn.send_message(msg_type, payload, droppable=droppable)

    def stop(self):
        self._stopping = True
        if self._listener is not None:
            try:
                self._listener.close()
            except OSError:
                pass
        for conn in self.clients():
            conn.close()


# ------------------------------------------------------------ pipeline glue

def spec_payload(spec, current_page: str) -> dict:
    return {
        "name": spec.name,
        "width": spec.width,
        "height": spec.height,
        "start": spec.start_page,
        "page": current_page,
        "page_order": spec.page_order,
        "pages": [
            {
                "id": page.id,
                "zones": [
                    {"id": z.id, "x": z.x, "y": z.y, "w": z.w, "h": z.h,
                     "label": z.label, "action": z.action.name,
                     "p1": z.p1, "p2": z.p2}
                    for z in page.zones
                ],
            }
            for page in spec.pages
        ],
    }


def report_messages(report) -> list[tuple[str, dict]]:
    """Flatten one FrameReport into protocol messages, in emission order."""
    out: list[tuple[str, dict]] = []
    for event in report.events:
        out.append(("zone_event", {"event": event.kind, "zone": event.zone,
                                   "page": event.page}))
    if report.edge is not None:
        out.append(("click_event", {"edge": report.edge, "zone": report.hovered,
                                    "page": report.page}))
    for order in report.orders:
        out.append(("order_executed", {"action": order.action, "p1": order.p1,
                                       "p2": order.p2,
                                       "name": ActionType(order.action).name}))
    if report.cursor is not None:
        out.append(("cursor", {"x": float(report.cursor[0]),
                               "y": float(report.cursor[1]),
                               "pressed": bool(report.pressed),
                               "page": report.page}))
    if report.text is not None:
        out.append(("text_buffer", {"text": report.text}))
    out.append(("timing", {
        "frame": report.index,
        "stages": {k: round(v * 1000.0, 3) for k, v in report.timings.items()},
    }))
    return out


class GatewayService:
    """Ties a GatewayServer to a Pipeline: snapshots, reports, commands."""

    def __init__(self, pipeline, host: str = "127.0.0.1", port: int = 0):
        self.pipeline = pipeline
        self.server = GatewayServer(host=host, port=port,
                                    on_client=self._greet,
                                    on_command=self._command)

    def start(self):
        self.server.start()
        return self

    @property
    def port(self) -> int:
        return self.server.port

    def _greet(self, conn: ClientConnection):
        conn.send_hello()
        conn.send_message(
            "spec", spec_payload(self.pipeline.spec, self.pipeline.session.page),
            droppable=False)

    def _command(self, conn: ClientConnection, obj: dict):
        if obj.get("type") != "command":
            conn.send_message("command_ack",
                              {"ok": False, "command": obj.get("type"),
                               "error": "expected type 'command'"},
                              droppable=False)
            return
        name = obj.get("command")

        def reply(ack: dict):
            conn.send_message("command_ack",
                              {"ok": ack["ok"], "command": name,
                               "error": ack["error"]},
                              droppable=False)
            if ack["ok"] and name == "load_interface":
                conn.send_message(
                    "spec",
                    spec_payload(self.pipeline.spec, self.pipeline.session.page),
                    droppable=False)

        self.pipeline.submit_command(obj, reply=reply)

    def publish(self, report):
        for msg_type, payload in report_messages(report):
            if msg_type == "text_buffer":
                for conn in self.server.clients():
                    if conn.last_text_sent != payload["text"]:
                        conn.last_text_sent = payload["text"]
                        conn.send_message(msg_type, payload)
            else:
                self.server.broadcast(msg_type, payload)

    def stop(self):
        self.server.stop()


def serve(pipeline, host: str = "127.0.0.1", port: int = 0) -> GatewayService:
    """Start a gateway bound to the pipeline; wire publish into run()."""
    return GatewayService(pipeline, host=host, port=port).start()


# ------------------------------------------------------------ test client

class GatewayClient:
    """Small synchronous WebSocket client (tests and the CLI tail mode)."""

    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        key = base64.b64encode(os.urandom(16)).decode()
        request = (
            f"GET / HTTP/1.1\r\n"
            f"Host: {host}:{port}\r\n"
            f"Upgrade: websocket\r\n"
            f"Connection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\n"
            f"Sec-WebSocket-Version: 13\r\n\r\n"
        )
        self.sock.sendall(request.encode())
        response = b""
        while b"\r\n\r\n" not in response:
            chunk = self.sock.recv(4096)
            if not chunk:
                raise ConnectionError("server closed during handshake")
            response += chunk
        status = response.split(b"\r\n", 1)[0]
        if b"101" not in status:
            raise ConnectionError(f"handshake rejected: {status!r}")
        expect = accept_key(key)
        if expect.encode() not in response:
            raise ConnectionError("bad Sec-WebSocket-Accept")

    def recv_json(self) -> dict:
        while True:
            opcode, payload = read_frame(self.sock)
            if opcode == _CLOSE:
                raise ConnectionError("server closed")
            if opcode == _TEXT:
                return json.loads(payload.decode("utf-8"))

    def send_json(self, obj):
        data = encode_json(obj).encode("utf-8")
        self.sock.sendall(encode_frame(data, mask=True))

    def close(self):
        try:
            self.sock.sendall(encode_frame(b"", opcode=_CLOSE, mask=True))
        except OSError:
            pass
        self.sock.close()
