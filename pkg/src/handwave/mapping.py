"""Hand-position to cursor-position strategies.

Three modes: absolute (ratio of an active control rectangle), linear
relative (scaled displacement), and nonlinear relative (displacement with a
speed-dependent boost so slow motions stay precise and fast ones cover
ground).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class MappingMode(str, Enum):
    ABSOLUTE = "absolute"
    LINEAR_RELATIVE = "linear"
    NONLINEAR_RELATIVE = "nonlinear"


def default_active_rect(frame_w: int, frame_h: int, margin: float = 0.1):
    """Central control rectangle: the user never has to reach frame edges."""
    return (frame_w * margin, frame_h * margin,
            frame_w * (1.0 - 2.0 * margin), frame_h * (1.0 - 2.0 * margin))


@dataclass(frozen=True)
class MappingParams:
    active_rect: tuple[float, float, float, float]   # (x, y, w, h) frame coords
    gain: float = 1.5
    nl_alpha: float = 2.0
    nl_ref: float = 40.0
    smooth: float = 0.0   # exponential smoothing on the displacement, 0 = off

    def __post_init__(self):
        if self.nl_ref <= 0:
            raise ValueError("nl_ref must be > 0")
        if self.gain <= 0:
            raise ValueError("gain must be > 0")
        if not (0.0 <= self.smooth < 1.0):
            raise ValueError("smooth must be in [0, 1)")


@dataclass
class CursorState:
    x: float = 0.0
    y: float = 0.0
    mode: MappingMode = MappingMode.ABSOLUTE
    prev_hand: tuple[float, float] | None = None
    prev_delta: tuple[float, float] = (0.0, 0.0)

    @property
    def pos(self) -> tuple[float, float]:
        return self.x, self.y


def _clamp(v, lo, hi):
    return lo if v < lo else hi if v > hi else v


def map_absolute(hand, p: MappingParams, iface_dims) -> tuple[float, float]:
    """Ratio mapping: active_rect corners land exactly on interface corners."""
    ax, ay, aw, ah = p.active_rect
    if aw <= 0 or ah <= 0:
        raise ValueError("active_rect is degenerate")
    iw, ih = iface_dims
    rx = _clamp((hand[0] - ax) / aw, 0.0, 1.0)
    ry = _clamp((hand[1] - ay) / ah, 0.0, 1.0)
    return _clamp(rx * iw, 0.0, iw - 1.0), _clamp(ry * ih, 0.0, ih - 1.0)


def nonlinear_magnitude(delta_mag: float, p: MappingParams) -> float:
    """Applied displacement length for a hand displacement of given length.

    Strictly increasing with zero fixed point: gentle near zero (noise stays
    put), boosted up to (1 + nl_alpha) for fast motion.
    """
    boost = 1.0 + p.nl_alpha * min(1.0, delta_mag / p.nl_ref)
    return p.gain * delta_mag * boost


def _advance(state: CursorState, hand, p: MappingParams, iface_dims, boost_fn):
    if state.prev_hand is None:
        delta = (0.0, 0.0)
    else:
        delta = (hand[0] - state.prev_hand[0], hand[1] - state.prev_hand[1])
    if p.smooth > 0.0:
        delta = (p.smooth * state.prev_delta[0] + (1.0 - p.smooth) * delta[0],
                 p.smooth * state.prev_delta[1] + (1.0 - p.smooth) * delta[1])
    mag = math.hypot(*delta)
    scale = p.gain * boost_fn(mag)
    iw, ih = iface_dims
    state.x = _clamp(state.x + scale * delta[0], 0.0, iw - 1.0)
    state.y = _clamp(state.y + scale * delta[1], 0.0, ih - 1.0)
    state.prev_hand = (float(hand[0]), float(hand[1]))
    state.prev_delta = delta
    return state


def map_relative_linear(state: CursorState, hand, p: MappingParams, iface_dims) -> CursorState:
    """Move the cursor by gain times the hand displacement."""
    return _advance(state, hand, p, iface_dims, lambda mag: 1.0)


def map_relative_nonlinear(state: CursorState, hand, p: MappingParams, iface_dims) -> CursorState:
    """Like linear, with a saturating speed boost on the displacement."""
    return _advance(
        state, hand, p, iface_dims,
        lambda mag: 1.0 + p.nl_alpha * min(1.0, mag / p.nl_ref),
    )


def apply_mapping(state: CursorState, hand, p: MappingParams, iface_dims) -> CursorState:
    """Advance the cursor according to state.mode."""
    if state.mode is MappingMode.ABSOLUTE:
        state.x, state.y = map_absolute(hand, p, iface_dims)
        state.prev_hand = (float(hand[0]), float(hand[1]))
        return state
    if state.mode is MappingMode.LINEAR_RELATIVE:
        return map_relative_linear(state, hand, p, iface_dims)
    return map_relative_nonlinear(state, hand, p, iface_dims)
