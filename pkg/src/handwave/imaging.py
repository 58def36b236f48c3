"""Raster primitives: RGB frames, HSV conversion, mask logic, binary morphology.

Masks are plain 2-d bool arrays of shape (height, width), True marking the
zone of interest.  All functions here are pure and safe to call from any
number of threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Frame:
    """One RGB image from a source.  pixels is (height, width, 3) uint8."""

    pixels: np.ndarray
    index: int = 0

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise ValueError("frame pixels must be (h, w, 3) uint8")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("frame must be at least 1x1")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def dims(self) -> tuple[int, int]:
        """(width, height)."""
        return self.pixels.shape[1], self.pixels.shape[0]


def _square3() -> np.ndarray:
    return np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class StructuringElement:
    """3x3 neighborhood pattern for erosion/dilation, anchored at the center."""

    cells: np.ndarray = field(default_factory=_square3)

    def __post_init__(self):
        c = np.asarray(self.cells, dtype=bool)
        if c.shape != (3, 3):
            raise ValueError("structuring element must be 3x3")
        if not c.any():
            raise ValueError("structuring element must have at least one cell")
        object.__setattr__(self, "cells", c)

    def offsets(self):
        """(dy, dx) of every active cell relative to the center."""
        ys, xs = np.nonzero(self.cells)
        return [(int(y) - 1, int(x) - 1) for y, x in zip(ys, xs)]


SQUARE3 = StructuringElement()


def rgb_to_hsv(r: int, g: int, b: int) -> tuple[float, float, float]:
    """Hexcone conversion of one 0-255 RGB triple to (h, s, v).

    h is in degrees [0, 360), s and v in [0, 1].  Achromatic pixels get the
    canonical hue 0 so the function is total.
    """
    mx = max(r, g, b)
    mn = min(r, g, b)
    c = mx - mn
    v = mx / 255.0
    s = 0.0 if mx == 0 else c / mx
    if c == 0:
        h = 0.0
    elif mx == r:
        h = 60.0 * (((g - b) / c) % 6.0)
    elif mx == g:
        h = 60.0 * ((b - r) / c + 2.0)
    else:
        h = 60.0 * ((r - g) / c + 4.0)
    if h >= 360.0:
        h -= 360.0
    return h, s, v


def hsv_to_rgb(h: float, s: float, v: float) -> tuple[int, int, int]:
    """Inverse hexcone conversion, rounding to integer 0-255 channels."""
    c = v * s
    hp = (h % 360.0) / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    sector = int(hp) % 6
    rp, gp, bp = [
        (c, x, 0.0), (x, c, 0.0), (0.0, c, x),
        (0.0, x, c), (x, 0.0, c), (c, 0.0, x),
    ][sector]
    m = v - c
    return (
        int(round((rp + m) * 255.0)),
        int(round((gp + m) * 255.0)),
        int(round((bp + m) * 255.0)),
    )


def channel_planes(pixels: np.ndarray) -> np.ndarray:
    """(h, w, 3) interleaved image -> contiguous (3, h, w) channel planes.

    One copy that pays for itself: plane-wise kernels vectorize far better
    than stride-3 channel views.
    """
    return np.ascontiguousarray(pixels.transpose(2, 0, 1))


def hsv_planes(r: np.ndarray, g: np.ndarray, b: np.ndarray):
    """Hexcone conversion of three uint8 channel planes; float64 outputs
    match rgb_to_hsv bit for bit."""
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    mxf = mx.astype(np.float64)
    cf = (mx - mn).astype(np.float64)

    val = mxf / 255.0
    nonzero = mx > 0
    sat = np.where(nonzero, cf / np.where(nonzero, mxf, 1.0), 0.0)

    chromatic = cf > 0
    csafe = np.where(chromatic, cf, 1.0)
    gb = (g.astype(np.int16) - b) / csafe
    br = (b.astype(np.int16) - r) / csafe
    rg = (r.astype(np.int16) - g) / csafe
    hue = np.where(mx == r, gb % 6.0, np.where(mx == g, br + 2.0, rg + 4.0))
    hue = np.where(chromatic, hue * 60.0, 0.0)
    hue = np.where(hue >= 360.0, hue - 360.0, hue)
    return hue, sat, val


def rgb_image_to_hsv(pixels: np.ndarray):
    """Vectorized hexcone conversion of an (h, w, 3) uint8 image.

    Returns three float64 planes (hue, sat, val) matching rgb_to_hsv exactly.
    """
    planes = channel_planes(pixels)
    return hsv_planes(planes[0], planes[1], planes[2])


def mask_and(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Per-pixel conjunction of three equally shaped masks."""
    if a.shape != b.shape or a.shape != c.shape:
        raise ValueError(
            f"mask shapes differ: {a.shape} vs {b.shape} vs {c.shape}"
        )
    return a & b & c


def _padded(mask: np.ndarray, fill: bool) -> np.ndarray:
    h, w = mask.shape
    out = np.full((h + 2, w + 2), fill, dtype=bool)
    out[1:-1, 1:-1] = mask
    return out


def erode(mask: np.ndarray, se: StructuringElement = SQUARE3) -> np.ndarray:
    """Output true iff every active cell of se lands on a true input pixel.

    Out-of-bounds neighbors count as false, so the result shrinks at the
    border.
    """
    h, w = mask.shape
    padded = _padded(mask, False)
    out = np.ones((h, w), dtype=bool)
    for dy, dx in se.offsets():
        np.logical_and(out, padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w], out=out)
    return out


def dilate(mask: np.ndarray, se: StructuringElement = SQUARE3) -> np.ndarray:
    """Output true iff any active cell of se lands on a true input pixel.

    Same border convention as erode: outside the image is false.
    """
    h, w = mask.shape
    padded = _padded(mask, False)
    out = np.zeros((h, w), dtype=bool)
    for dy, dx in se.offsets():
        np.logical_or(out, padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w], out=out)
    return out


def morph_cleanup(mask: np.ndarray, open_rounds: int, close_rounds: int,
                  se: StructuringElement = SQUARE3) -> np.ndarray:
    """Opening to drop speckle noise, then closing to bridge nearby blobs."""
    if open_rounds < 0 or close_rounds < 0:
        raise ValueError("round counts must be >= 0")
    out = mask
    for _ in range(open_rounds):
        out = dilate(erode(out, se), se)
    for _ in range(close_rounds):
        out = erode(dilate(out, se), se)
    return out
