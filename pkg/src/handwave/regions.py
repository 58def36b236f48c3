"""Connected regions of the segmentation mask and frame-to-frame hand tracking."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Region:
    """One connected component with its size and position features."""

    label: int
    area: int
    centroid: tuple[float, float]        # (x, y)
    bbox: tuple[int, int, int, int]      # (x_min, y_min, x_max, y_max) inclusive
    pixels: np.ndarray | None = None     # (n, 2) int32 columns (x, y)


def label_components(mask: np.ndarray, connectivity: int = 8) -> list[Region]:
    """Partition true pixels into maximal connected components.

    Labels are assigned in first-encounter raster-scan order, so the result
    is deterministic for a given mask.
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    structure = _STRUCTURE_4 if connectivity == 4 else _STRUCTURE_8
    labeled, n = ndimage.label(mask, structure=structure)
    if n == 0:
        return []

    h, w = mask.shape
    flat_idx = np.flatnonzero(labeled.ravel())
    labs = labeled.ravel()[flat_idx]
    # first-encounter raster order: position of each label's first pixel
    uniq, first = np.unique(labs, return_index=True)
    raster_rank = np.empty(n + 1, dtype=np.int64)
    raster_rank[uniq[np.argsort(first)]] = np.arange(1, n + 1)

    new_labs = raster_rank[labs]
    ys, xs = np.divmod(flat_idx, w)
    order = np.argsort(new_labs, kind="stable")
    new_labs = new_labs[order]
    ys = ys[order]
    xs = xs[order]
    counts = np.bincount(new_labs, minlength=n + 1)[1:]
    stops = np.cumsum(counts)

    regions = []
    start = 0
    for i, stop in enumerate(stops):
        rx = xs[start:stop]
        ry = ys[start:stop]
        pix = np.column_stack([rx, ry]).astype(np.int32)
        regions.append(Region(
            label=i + 1,
            area=int(counts[i]),
            centroid=(float(rx.mean()), float(ry.mean())),
            bbox=(int(rx.min()), int(ry.min()), int(rx.max()), int(ry.max())),
            pixels=pix,
        ))
        start = stop
    return regions


def compute_features(pixels, label: int = 0) -> Region:
    """Area, centroid, and bbox of an explicit pixel set ((x, y) pairs)."""
    pix = np.asarray(pixels, dtype=np.int32)
    if pix.size == 0:
        raise ValueError("empty pixel set has no features")
    pix = pix.reshape(-1, 2)
    xs = pix[:, 0]
    ys = pix[:, 1]
    return Region(
        label=label,
        area=int(pix.shape[0]),
        centroid=(float(xs.mean()), float(ys.mean())),
        bbox=(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max())),
        pixels=pix,
    )


@dataclass(frozen=True)
class SelectionPolicy:
    """Master-hand choice: big enough, then largest, ties toward top-left."""

    a_min_fraction: float = 0.005


def select_master(regions, frame_dims, policy: SelectionPolicy | None = None):
    """Pick the controlling-hand region, or None when nothing qualifies."""
    policy = policy or SelectionPolicy()
    w, h = frame_dims
    min_area = policy.a_min_fraction * w * h
    best = None
    best_key = None
    for r in regions:
        if r.area < min_area:
            continue
        key = (-r.area, r.centroid[1], r.centroid[0])
        if best is None or key < best_key:
            best, best_key = r, key
    return best


@dataclass(frozen=True)
class TrackParams:
    d_max_fraction: float = 0.2   # of the frame diagonal
    ratio_lo: float = 0.3
    ratio_hi: float = 3.0
    max_lost: int = 10
    history_len: int = 15
    selection: SelectionPolicy = field(default_factory=SelectionPolicy)


@dataclass
class TrackState:
    current: Region | None = None
    last_seen_frame: int = -1
    frames_lost: int = 0
    area_history: deque = field(default_factory=lambda: deque(maxlen=15))


def track(state: TrackState, regions, frame_dims,
          params: TrackParams | None = None, frame_index: int = -1) -> TrackState:
    """Advance the tracker with this frame's regions.

    Matches by nearest centroid within a distance gate and an area-ratio
    gate; falls back to fresh selection, then to holding the previous region
    for up to max_lost frames.  Selection depends only on geometry, never on
    the order of the candidate list.
    """
    params = params or TrackParams()

    def adopt(region):
        state.current = region
        state.frames_lost = 0
        state.last_seen_frame = frame_index
        state.area_history.append(region.area)

    matched = None
    if state.current is not None:
        w, h = frame_dims
        d_max = params.d_max_fraction * math.hypot(w, h)
        cx, cy = state.current.centroid
        best_key = None
        for r in regions:
            d = math.hypot(r.centroid[0] - cx, r.centroid[1] - cy)
            ratio = r.area / state.current.area
            if d <= d_max and params.ratio_lo <= ratio <= params.ratio_hi:
                key = (d, r.centroid[1], r.centroid[0])
                if best_key is None or key < best_key:
                    matched, best_key = r, key

    if matched is None:
        matched = select_master(regions, frame_dims, params.selection)

    if matched is not None:
        adopt(matched)
    elif state.current is not None:
        state.frames_lost += 1
        if state.frames_lost > params.max_lost:
            state.current = None
    return state
