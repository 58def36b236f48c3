"""Order execution backends.

Actions travel as triples of integers (type, p1, p2).  The enum numbering
below is frozen; it is part of the recorder log format and the gateway
protocol.

Backends:
  * InterfaceControlBackend drives the virtual interface's own state (text
    buffer, click/wheel counters).
  * RecorderBackend appends every order to a replayable text log.
  * DirectSystemIntegrationBackend forwards to an OS input-injection
    adapter; only a logging adapter ships here, real injection is a
    platform concern behind the same interface.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from enum import IntEnum


class ActionType(IntEnum):
    NOOP = 0
    KEY_PRESS = 1
    KEY_BACKSPACE = 2
    KEY_RETURN = 3
    KEY_SPACE = 4
    MOUSE_LEFT = 5
    MOUSE_RIGHT = 6
    MOUSE_DOUBLE = 7
    WHEEL_UP = 8
    WHEEL_DOWN = 9
    PAGE_GOTO = 10


@dataclass(frozen=True)
class Order:
    """The three-integer action triple."""

    action: int
    p1: int = 0
    p2: int = 0

    def triple(self) -> tuple[int, int, int]:
        return self.action, self.p1, self.p2


@dataclass(frozen=True)
class Receipt:
    accepted: bool
    seq: int


class EngineError(RuntimeError):
    """Raised when a backend cannot execute an order."""


def encode_action(action, p1: int = 0, p2: int = 0) -> Order:
    """Build an Order from an action name or enum member."""
    if isinstance(action, str):
        try:
            action = ActionType[action]
        except KeyError:
            raise ValueError(f"unknown action {action!r}") from None
    else:
        action = ActionType(action)  # raises ValueError on unknown ints
    return Order(int(action), int(p1), int(p2))


def decode_action(order: Order) -> tuple[ActionType, int, int]:
    return ActionType(order.action), order.p1, order.p2


class _BaseBackend:
    kind = "base"

    def __init__(self):
        self._seq = 0

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def execute(self, order: Order) -> Receipt:
        ActionType(order.action)  # reject unknown action types early
        seq = self._next_seq()
        self._apply(order, seq)
        return Receipt(accepted=True, seq=seq)

    def _apply(self, order: Order, seq: int):
        raise NotImplementedError


class InterfaceControlBackend(_BaseBackend):
    """Applies orders to an internal text buffer and event counters."""

    kind = "ic"

    def __init__(self):
        super().__init__()
        self._chars: list[str] = []
        self.events: list[tuple[int, int, int]] = []
        self.wheel_position = 0

    @property
    def text(self) -> str:
        return "".join(self._chars)

    def _apply(self, order: Order, seq: int):
        action = ActionType(order.action)
        if action is ActionType.KEY_PRESS:
            self._chars.append(chr(order.p1))
        elif action is ActionType.KEY_BACKSPACE:
            if self._chars:
                self._chars.pop()
        elif action is ActionType.KEY_RETURN:
            self._chars.append("\n")
        elif action is ActionType.KEY_SPACE:
            self._chars.append(" ")
        elif action is ActionType.WHEEL_UP:
            self.wheel_position += 1
            self.events.append(order.triple())
        elif action is ActionType.WHEEL_DOWN:
            self.wheel_position -= 1
            self.events.append(order.triple())
        elif action in (ActionType.MOUSE_LEFT, ActionType.MOUSE_RIGHT,
                        ActionType.MOUSE_DOUBLE):
            self.events.append(order.triple())
        # NOOP and PAGE_GOTO leave the buffer untouched; page switching is
        # resolved before orders reach the engine


class RecorderBackend(_BaseBackend):
    """Appends `seq<TAB>timestamp_ms<TAB>type<TAB>p1<TAB>p2` per order."""

    kind = "record"

    def __init__(self, clock=None):
        super().__init__()
        self.clock = clock or (lambda: int(time.time() * 1000))
        self.lines: list[str] = []

    def _apply(self, order: Order, seq: int):
        t = int(self.clock())
        self.lines.append(f"{seq}\t{t}\t{order.action}\t{order.p1}\t{order.p2}")

    def dump(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")

    def triples(self) -> list[tuple[int, int, int]]:
        out = []
        for line in self.lines:
            _, _, a, p1, p2 = line.split("\t")
            out.append((int(a), int(p1), int(p2)))
        return out


class LoggingInjector:
    """Stand-in OS adapter: records the calls it would make."""

    def __init__(self):
        self.calls: list[str] = []

    def move(self, x: float, y: float):
        self.calls.append(f"move {x:.1f} {y:.1f}")

    def button(self, name: str):
        self.calls.append(f"button {name}")

    def wheel(self, steps: int):
        self.calls.append(f"wheel {steps:+d}")

    def key(self, code: int):
        self.calls.append(f"key {code}")


class DirectSystemIntegrationBackend(_BaseBackend):
    """Maps orders onto an injector that emulates OS mouse/keyboard input."""

    kind = "dsi"

    def __init__(self, injector=None):
        super().__init__()
        self.injector = injector if injector is not None else LoggingInjector()

    def move_cursor(self, x: float, y: float):
        self.injector.move(x, y)

    def _apply(self, order: Order, seq: int):
        action = ActionType(order.action)
        inj = self.injector
        try:
            if action is ActionType.MOUSE_LEFT:
                inj.button("left")
            elif action is ActionType.MOUSE_RIGHT:
                inj.button("right")
            elif action is ActionType.MOUSE_DOUBLE:
                inj.button("double")
            elif action is ActionType.WHEEL_UP:
                inj.wheel(+1)
            elif action is ActionType.WHEEL_DOWN:
                inj.wheel(-1)
            elif action in (ActionType.KEY_PRESS, ActionType.KEY_BACKSPACE,
                            ActionType.KEY_RETURN, ActionType.KEY_SPACE):
                code = order.p1
                if action is ActionType.KEY_SPACE:
                    code = 32
                elif action is ActionType.KEY_BACKSPACE:
                    code = 8
                elif action is ActionType.KEY_RETURN:
                    code = 13
                inj.key(code)
        except Exception as exc:
            raise EngineError(f"injector failed on {order.triple()}: {exc}") from exc


def make_backend(kind: str, clock=None):
    if kind == "ic":
        return InterfaceControlBackend()
    if kind == "record":
        return RecorderBackend(clock=clock)
    if kind == "dsi":
        return DirectSystemIntegrationBackend()
    raise ValueError(f"unknown backend kind {kind!r}")


def execute(backend, order: Order) -> Receipt:
    """Run one order on a backend, returning its receipt."""
    return backend.execute(order)
