"""Frame sources: synthetic scripts, image directories, optional camera.

A source yields Frames of constant dimensions with increasing indices.
Sources that can produce hand-free views of the scene expose
calibration_frames(n); the pipeline uses those for background learning and
numbers gesture frames after them.
"""
from __future__ import annotations

import os

import numpy as np

from .imaging import Frame
from .synthetic import GestureScript, load_script, render_background, render_pose

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".ppm", ".pgm", ".tif", ".tiff")


class SourceError(RuntimeError):
    pass


class SyntheticScriptSource:
    """Renders a gesture script; calibration frames are the bare background."""

    kind = "script"

    def __init__(self, script: GestureScript, calibration_count: int = 30):
        self.script = script
        self.calibration_count = calibration_count
        self.fps_hint = script.fps

    @classmethod
    def from_file(cls, path, calibration_count: int = 30):
        return cls(load_script(path), calibration_count=calibration_count)

    @property
    def dims(self):
        return self.script.width, self.script.height

    def calibration_frames(self, n: int):
        for i in range(n):
            yield Frame(render_background(self.script, i), index=i)

    def frames(self):
        base = self.calibration_count
        for i in range(len(self.script)):
            pixels, _ = render_pose(self.script, self.script.poses[i], base + i)
            yield Frame(pixels, index=base + i)

    def truth_mask(self, i: int) -> np.ndarray:
        _, truth = render_pose(self.script, self.script.poses[i], self.calibration_count + i)
        return truth


class ImageSequenceSource:
    """Numbered images in a directory; the first n serve as calibration."""

    kind = "seq"

    def __init__(self, directory):
        from PIL import Image  # deferred so numpy-only users skip the import

        self._image = Image
        self.directory = directory
        names = [f for f in sorted(os.listdir(directory))
                 if f.lower().endswith(IMAGE_EXTENSIONS)]
        if not names:
            raise SourceError(f"no images found in {directory}")
        self._paths = [os.path.join(directory, f) for f in names]
        self._cursor = 0
        first = self._load(self._paths[0])
        self.dims = (first.shape[1], first.shape[0])
        self.fps_hint = 30.0

    def _load(self, path) -> np.ndarray:
        with self._image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)

    def calibration_frames(self, n: int):
        for _ in range(n):
            if self._cursor >= len(self._paths):
                raise SourceError("image sequence exhausted during calibration")
            yield self._frame_at(self._cursor)
            self._cursor += 1

    def frames(self):
        while self._cursor < len(self._paths):
            yield self._frame_at(self._cursor)
            self._cursor += 1

    def _frame_at(self, i) -> Frame:
        pixels = self._load(self._paths[i])
        if (pixels.shape[1], pixels.shape[0]) != self.dims:
            raise SourceError(f"{self._paths[i]}: dimensions changed mid-sequence")
        return Frame(pixels, index=i)


class CameraSource:
    """Live capture via OpenCV; optional, never used by the test suite."""

    kind = "camera"

    def __init__(self, device: int = 0, fps_hint: float = 30.0):
        try:
            import cv2
        except ImportError as exc:
            raise SourceError("camera source needs opencv-python installed") from exc
        self._cap = cv2.VideoCapture(device)
        if not self._cap.isOpened():
            raise SourceError(f"cannot open camera {device}")
        self._cv2 = cv2
        self.fps_hint = fps_hint
        ok, frame = self._cap.read()
        if not ok:
            raise SourceError("camera produced no frame")
        self.dims = (frame.shape[1], frame.shape[0])
        self._first = frame
        self._index = 0

    def calibration_frames(self, n: int):
        for _ in range(n):
            yield self._grab()

    def frames(self):
        while True:
            yield self._grab()

    def _grab(self) -> Frame:
        if self._first is not None:
            bgr, self._first = self._first, None
        else:
            ok, bgr = self._cap.read()
            if not ok:
                raise SourceError("camera read failed")
        rgb = self._cv2.cvtColor(bgr, self._cv2.COLOR_BGR2RGB)
        frame = Frame(np.ascontiguousarray(rgb), index=self._index)
        self._index += 1
        return frame

    def close(self):
        self._cap.release()


def open_source(spec: str, calibration_count: int = 30):
    """Build a source from a `kind:arg` descriptor (script:, seq:, camera:)."""
    kind, _, arg = spec.partition(":")
    if kind == "script":
        return SyntheticScriptSource.from_file(arg, calibration_count=calibration_count)
    if kind == "seq":
        return ImageSequenceSource(arg)
    if kind == "camera":
        return CameraSource(int(arg or 0))
    raise SourceError(f"unknown source {spec!r} (expected script:|seq:|camera:)")
