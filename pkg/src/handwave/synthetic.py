"""Deterministic synthetic scenes for tests, benchmarks, and demos.

A gesture script is a line-oriented text file.  Directive lines start with
'@' and set scene parameters; every other non-comment line describes one
frame of the hand:

    @size 640 480            frame dimensions
    @background 70 80 90     flat background color (RGB)
    @distractor 20 20 60 40  grey rectangle drawn over the background
    @skin 15 0.55 0.80       hand color as HSV
    @openness 0.45           closed-hand area as a fraction of open area
    @noise 0                 per-channel gaussian noise sigma
    @seed 1                  noise seed
    @fps 30                  nominal frame rate (drives timestamps)
    cx cy rx ry open|closed  one hand pose per line ('none' = no hand)

The hand renders as a filled ellipse; 'closed' scales both radii by
sqrt(openness) so the closed area is openness times the open area, which
sits below the click detector's press threshold by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .imaging import Frame, hsv_to_rgb

DISTRACTOR_GREY = (150, 150, 150)


@dataclass(frozen=True)
class HandPose:
    cx: float
    cy: float
    rx: float
    ry: float
    open_: bool


@dataclass(frozen=True)
class GestureScript:
    width: int = 640
    height: int = 480
    background: tuple[int, int, int] = (70, 80, 90)
    distractors: tuple[tuple[int, int, int, int], ...] = ()
    skin_hsv: tuple[float, float, float] = (15.0, 0.55, 0.80)
    openness: float = 0.45
    noise_sigma: float = 0.0
    seed: int = 1
    fps: float = 30.0
    poses: tuple[HandPose | None, ...] = ()

    @property
    def skin_rgb(self) -> tuple[int, int, int]:
        return hsv_to_rgb(*self.skin_hsv)

    def __len__(self):
        return len(self.poses)


class ScriptError(ValueError):
    pass


def parse_script(text: str) -> GestureScript:
    script = GestureScript()
    distractors = []
    poses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "@size":
                script = replace(script, width=int(parts[1]), height=int(parts[2]))
            elif parts[0] == "@background":
                script = replace(script, background=tuple(int(v) for v in parts[1:4]))
            elif parts[0] == "@distractor":
                distractors.append(tuple(int(v) for v in parts[1:5]))
            elif parts[0] == "@skin":
                script = replace(script, skin_hsv=tuple(float(v) for v in parts[1:4]))
            elif parts[0] == "@openness":
                script = replace(script, openness=float(parts[1]))
            elif parts[0] == "@noise":
                script = replace(script, noise_sigma=float(parts[1]))
            elif parts[0] == "@seed":
                script = replace(script, seed=int(parts[1]))
            elif parts[0] == "@fps":
                script = replace(script, fps=float(parts[1]))
            elif parts[0].startswith("@"):
                raise ScriptError(f"line {lineno}: unknown directive {parts[0]!r}")
            elif parts[0] == "none":
                poses.append(None)
            else:
                cx, cy, rx, ry = (float(v) for v in parts[:4])
                state = parts[4]
                if state not in ("open", "closed"):
                    raise ScriptError(f"line {lineno}: expected open|closed, got {state!r}")
                poses.append(HandPose(cx, cy, rx, ry, state == "open"))
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ScriptError):
                raise
            raise ScriptError(f"line {lineno}: cannot parse {raw!r}") from exc
    return replace(script, distractors=tuple(distractors), poses=tuple(poses))


def load_script(path) -> GestureScript:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_script(fh.read())


def ellipse_mask(width, height, cx, cy, rx, ry) -> np.ndarray:
    ys = np.arange(height)[:, None]
    xs = np.arange(width)[None, :]
    return ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0


def _noise_rng(script: GestureScript, stream: int, index: int):
    return np.random.default_rng((script.seed, stream, index))


def _apply_noise(pixels: np.ndarray, rng, sigma: float) -> np.ndarray:
    noise = rng.normal(0.0, sigma, pixels.shape)
    return np.clip(pixels.astype(np.float64) + noise, 0, 255).astype(np.uint8)


def render_background(script: GestureScript, index: int, with_distractors: bool = False) -> np.ndarray:
    pixels = np.empty((script.height, script.width, 3), dtype=np.uint8)
    pixels[:] = script.background
    if with_distractors:
        for x, y, w, h in script.distractors:
            pixels[y:y + h, x:x + w] = DISTRACTOR_GREY
    if script.noise_sigma > 0:
        stream = 1 if with_distractors else 0
        pixels = _apply_noise(pixels, _noise_rng(script, stream, index), script.noise_sigma)
    return pixels


def render_pose(script: GestureScript, pose: HandPose | None, index: int):
    """Scene frame plus the ground-truth hand mask for that frame."""
    pixels = np.empty((script.height, script.width, 3), dtype=np.uint8)
    pixels[:] = script.background
    for x, y, w, h in script.distractors:
        pixels[y:y + h, x:x + w] = DISTRACTOR_GREY
    if pose is None:
        truth = np.zeros((script.height, script.width), dtype=bool)
    else:
        scale = 1.0 if pose.open_ else np.sqrt(script.openness)
        truth = ellipse_mask(script.width, script.height, pose.cx, pose.cy,
                             pose.rx * scale, pose.ry * scale)
        pixels[truth] = script.skin_rgb
    if script.noise_sigma > 0:
        pixels = _apply_noise(pixels, _noise_rng(script, 2, index), script.noise_sigma)
    return pixels, truth


def render_frame(script: GestureScript, index: int) -> tuple[Frame, np.ndarray]:
    pose = script.poses[index]
    pixels, truth = render_pose(script, pose, index)
    return Frame(pixels, index=index), truth
