"""Hand-candidate segmentation: three threshold branches merged into one mask.

A per-pixel Gaussian background model is learned from hand-free calibration
frames.  Each incoming frame is then reduced to a binary mask by three
independent branches:

  * background removal - any channel deviating from the learned mean by more
    than max(k_sigma * std, tau_min) marks the pixel foreground,
  * grey removal - pixels whose chroma (max - min channel) falls below a
    floor are dropped, cutting luminosity-only structure,
  * skin detection - HSV thresholds keep skin-toned pixels.

The three masks are ANDed and cleaned up with opening/closing.  Branches are
pure, so the merge is bit-identical whether they run sequentially or on a
thread pool.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .imaging import Frame, channel_planes, hsv_planes, morph_cleanup

DEFAULT_SIGMA_MIN = 2.0


@dataclass(frozen=True)
class FiziParams:
    """Branch thresholds and morphology rounds, all tunable from config."""

    k_sigma: float = 2.5
    tau_min: float = 10.0
    sigma_min: float = DEFAULT_SIGMA_MIN
    grey_chroma_delta: float = 24.0
    skin_hue_ranges: tuple[tuple[float, float], ...] = ((0.0, 50.0), (340.0, 360.0))
    skin_s_range: tuple[float, float] = (0.15, 0.90)
    skin_v_range: tuple[float, float] = (0.20, 1.00)
    open_rounds: int = 1
    close_rounds: int = 2

    def __post_init__(self):
        if self.k_sigma <= 0:
            raise ValueError("k_sigma must be > 0")
        for lo, hi in self.skin_hue_ranges:
            if not (0.0 <= lo < hi <= 360.0):
                raise ValueError(f"bad hue range [{lo}, {hi})")
        for lo, hi in (self.skin_s_range, self.skin_v_range):
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError("s/v ranges must be ordered within [0, 1]")


@dataclass(frozen=True)
class BackgroundModel:
    """Per-pixel per-channel sample mean and std of the empty scene."""

    mean: np.ndarray  # (h, w, 3) float64
    std: np.ndarray   # (h, w, 3) float64, floored at sigma_min
    sample_count: int

    def __post_init__(self):
        object.__setattr__(self, "_bounds_cache", {})

    @property
    def dims(self) -> tuple[int, int]:
        return self.mean.shape[1], self.mean.shape[0]

    def bounds(self, k_sigma: float, tau_min: float):
        """Cached per-channel integer acceptance band as (3, h, w) planes.

        A uint8 value v lies strictly outside mean +- threshold exactly when
        v < ceil(mean - threshold) or v > floor(mean + threshold), so the
        float comparison reduces to fast integer compares.
        """
        key = (float(k_sigma), float(tau_min))
        hit = self._bounds_cache.get(key)
        if hit is None:
            thresh = np.maximum(k_sigma * self.std, tau_min)
            low = np.ascontiguousarray(
                np.ceil(self.mean - thresh).transpose(2, 0, 1).astype(np.int16))
            high = np.ascontiguousarray(
                np.floor(self.mean + thresh).transpose(2, 0, 1).astype(np.int16))
            hit = (low, high)
            self._bounds_cache[key] = hit
        return hit


def learn_background(frames, sigma_min: float = DEFAULT_SIGMA_MIN) -> BackgroundModel:
    """Fit the per-pixel Gaussian model over hand-free frames.

    Uses sample statistics (n-1 denominator); the std is floored at
    sigma_min so later thresholds never collapse to zero.
    """
    count = 0
    total = None
    total_sq = None
    shape = None
    for frame in frames:
        pix = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
        if shape is None:
            shape = pix.shape
            total = np.zeros(shape, dtype=np.float64)
            total_sq = np.zeros(shape, dtype=np.float64)
        elif pix.shape != shape:
            raise ValueError(f"frame dims changed: {pix.shape} vs {shape}")
        pix = pix.astype(np.float64)
        total += pix
        total_sq += pix * pix
        count += 1
    if count < 2:
        raise ValueError("background learning needs at least 2 frames")
    mean = total / count
    var = (total_sq - total * total / count) / (count - 1)
    std = np.sqrt(np.maximum(var, 0.0))
    np.maximum(std, sigma_min, out=std)
    return BackgroundModel(mean=mean, std=std, sample_count=count)


# Kernels take contiguous (3, h, w) channel planes (or row-band views of
# them) so parallel execution can slice frames without copying.

def _background_kernel(planes, low, high, out=None):
    result = ((planes[0] < low[0]) | (planes[0] > high[0])
              | (planes[1] < low[1]) | (planes[1] > high[1])
              | (planes[2] < low[2]) | (planes[2] > high[2]))
    if out is not None:
        out[...] = result
        return out
    return result


def _grey_kernel(planes, p: FiziParams, out=None):
    r, g, b = planes
    chroma = np.maximum(np.maximum(r, g), b) - np.minimum(np.minimum(r, g), b)
    # chroma is integral, so >= delta is >= ceil(delta)
    return np.greater_equal(chroma, int(np.ceil(p.grey_chroma_delta)), out=out)


def _skin_kernel(planes, p: FiziParams, out=None):
    hue, sat, val = hsv_planes(planes[0], planes[1], planes[2])
    keep = np.zeros(hue.shape, dtype=bool)
    for lo, hi in p.skin_hue_ranges:
        keep |= (hue >= lo) & (hue < hi)
    keep &= (sat >= p.skin_s_range[0]) & (sat <= p.skin_s_range[1])
    keep &= (val >= p.skin_v_range[0]) & (val <= p.skin_v_range[1])
    if out is not None:
        out[...] = keep
        return out
    return keep


def remove_background(frame: Frame, bg: BackgroundModel, p: FiziParams) -> np.ndarray:
    """Foreground mask: any channel outside the learned tolerance band."""
    if frame.pixels.shape[:2] != bg.mean.shape[:2]:
        raise ValueError(
            f"frame {frame.pixels.shape[:2]} does not match model {bg.mean.shape[:2]}"
        )
    low, high = bg.bounds(p.k_sigma, p.tau_min)
    return _background_kernel(channel_planes(frame.pixels), low, high)


def remove_grey(frame: Frame, p: FiziParams) -> np.ndarray:
    """Keep pixels with chroma >= grey_chroma_delta (drop grey zones)."""
    return _grey_kernel(channel_planes(frame.pixels), p)


def detect_skin(frame: Frame, p: FiziParams) -> np.ndarray:
    """Keep pixels whose HSV falls inside the configured skin ranges."""
    return _skin_kernel(channel_planes(frame.pixels), p)


_pool: ThreadPoolExecutor | None = None
_pool_workers = 0


def _executor(workers: int) -> ThreadPoolExecutor:
    global _pool, _pool_workers
    if _pool is None or _pool_workers != workers:
        if _pool is not None:
            _pool.shutdown(wait=False)
        _pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="fizi")
        _pool_workers = workers
    return _pool


def default_workers() -> int:
    return max(2, min(8, os.cpu_count() or 1))


# Row-band granularity for the fused branch evaluation.  Bands keep the
# float intermediates of the skin branch inside the cache (roughly 3x
# faster than whole-frame passes at 640x480) and double as the work units
# for the thread pool.
BAND_ROWS = 64


def _merged_band(planes, low, high, p: FiziParams, out):
    """All three branches on one row band, ANDed into out."""
    bg = _background_kernel(planes, low, high)
    grey = _grey_kernel(planes, p)
    skin = _skin_kernel(planes, p)
    np.logical_and(bg, grey, out=out)
    np.logical_and(out, skin, out=out)
    return out


def fizi_mask(frame: Frame, bg: BackgroundModel, p: FiziParams,
              parallel: bool = False, workers: int = 0) -> np.ndarray:
    """Full segmentation: three branches, AND merge, morphological cleanup.

    The branch computations are evaluated per row band; with parallel=True
    the bands run concurrently on a shared thread pool.  The result is
    bit-identical either way since every kernel is elementwise.
    """
    if frame.pixels.shape[:2] != bg.mean.shape[:2]:
        raise ValueError(
            f"frame {frame.pixels.shape[:2]} does not match model {bg.mean.shape[:2]}"
        )
    planes = channel_planes(frame.pixels)
    low, high = bg.bounds(p.k_sigma, p.tau_min)
    h, w = frame.pixels.shape[:2]
    merged = np.empty((h, w), dtype=bool)
    bands = [slice(y0, min(y0 + BAND_ROWS, h)) for y0 in range(0, h, BAND_ROWS)]
    if not parallel:
        for band in bands:
            _merged_band(planes[:, band], low[:, band], high[:, band],
                         p, merged[band])
    else:
        pool = _executor(workers or default_workers())
        jobs = [
            pool.submit(_merged_band, planes[:, band], low[:, band],
                        high[:, band], p, merged[band])
            for band in bands
        ]
        for job in jobs:
            job.result()
    return morph_cleanup(merged, p.open_rounds, p.close_rounds)
