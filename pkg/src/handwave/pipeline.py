"""Per-frame orchestration: calibrate, segment, track, map, interact, execute.

The pipeline owns every piece of mutable state (tracker, cursor, click
detector, interface session, engine backend) and advances them one frame at
a time.  Operator commands arriving from the gateway are applied strictly
between frames, so no frame ever sees a half-applied configuration.
"""
from __future__ import annotations

import queue
import struct
import time
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .config import ConfigError, PipelineConfig
from .engine import (DirectSystemIntegrationBackend, EngineError,
                     InterfaceControlBackend, RecorderBackend, make_backend)
from .fizi import BackgroundModel, fizi_mask, learn_background
from .interface import InterfaceSession, build_lookup, parse_interface
from .mapping import CursorState, MappingMode, apply_mapping
from .regions import TrackState, label_components, track

MODEL_MAGIC = b"HWBGMODL"
MODEL_VERSION = 1


def save_background_model(model: BackgroundModel, path):
    """Binary layout: magic, u16 version, u32 w/h/samples, then float32
    means and stds, row-major with interleaved channels, little-endian."""
    h, w, _ = model.mean.shape
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<HIII", MODEL_VERSION, w, h, model.sample_count))
        fh.write(model.mean.astype("<f4").tobytes())
        fh.write(model.std.astype("<f4").tobytes())


def load_background_model(path) -> BackgroundModel:
    with open(path, "rb") as fh:
        magic = fh.read(len(MODEL_MAGIC))
        if magic != MODEL_MAGIC:
            raise ValueError(f"{path}: not a background model file")
        version, w, h, samples = struct.unpack("<HIII", fh.read(14))
        if version != MODEL_VERSION:
            raise ValueError(f"{path}: unsupported model version {version}")
        n = h * w * 3
        raw_mean = fh.read(4 * n)
        raw_std = fh.read(4 * n)
        if len(raw_mean) != 4 * n or len(raw_std) != 4 * n:
            raise ValueError(f"{path}: truncated model file")
        mean = np.frombuffer(raw_mean, dtype="<f4").reshape(h, w, 3)
        std = np.frombuffer(raw_std, dtype="<f4").reshape(h, w, 3)
    return BackgroundModel(mean=mean.astype(np.float64),
                           std=std.astype(np.float64), sample_count=samples)


def run_calibration(source, n_frames: int) -> BackgroundModel:
    """Consume n frames from the source and learn the background model."""
    if n_frames < 2:
        raise ValueError("calibration needs at least 2 frames")
    if hasattr(source, "calibration_frames"):
        frames = list(source.calibration_frames(n_frames))
    else:
        frames = []
        it = source.frames()
        for _ in range(n_frames):
            try:
                frames.append(next(it))
            except StopIteration:
                break
    if len(frames) < n_frames:
        raise ValueError("source exhausted during calibration")
    return learn_background(frames)


@dataclass(frozen=True)
class RegionSummary:
    area: int
    centroid: tuple[float, float]
    bbox: tuple[int, int, int, int]


@dataclass(frozen=True)
class FrameReport:
    index: int
    timings: dict
    mask_pixels: int
    region_count: int
    region: RegionSummary | None
    tracking_lost: bool
    cursor: tuple[float, float] | None
    pressed: bool
    page: str
    hovered: str | None
    edge: str | None
    events: tuple
    orders: tuple
    text: str | None
    errors: tuple


@dataclass
class RunSummary:
    frames: int = 0
    orders: list = field(default_factory=list)
    text: str | None = None
    recorder_lines: list = field(default_factory=list)


class Pipeline:
    def __init__(self, config: PipelineConfig, source, interface_xml: str,
                 backend=None, model: BackgroundModel | None = None,
                 recorder: RecorderBackend | None = None):
        self.config = config
        self.source = source
        self.spec = parse_interface(interface_xml)
        self._interface_xml = interface_xml
        self.session = InterfaceSession(
            self.spec,
            build_lookup(self.spec, config.lookup_cell_size),
            double_click_ms=config.click_double_ms,
        )
        self.model = model
        self.fps = getattr(source, "fps_hint", 30.0) or 30.0
        self._now_ms = 0
        if backend is None:
            backend = make_backend(config.backend, clock=lambda: self._now_ms)
        self.backend = backend
        # optional passive order log alongside the active backend
        self.recorder = recorder
        if recorder is None and config.recorder_path and not isinstance(
                backend, RecorderBackend):
            self.recorder = RecorderBackend(clock=lambda: self._now_ms)
        self.fizi_params = config.fizi_params()
        self.track_params = config.track_params()
        self.mapping_params = config.mapping_params(source.dims)
        self.detector = config.click_detector()
        self.track_state = TrackState(area_history=deque(maxlen=config.track_history))
        self.cursor = CursorState(
            x=(self.spec.width - 1) / 2.0,
            y=(self.spec.height - 1) / 2.0,
            mode=config.mapping_mode_enum(),
        )
        self.commands: queue.Queue = queue.Queue()
        self._stop = False
        self.frames_processed = 0

    # ------------------------------------------------------------ control

    def calibrate(self) -> BackgroundModel:
        self.model = run_calibration(self.source, self.config.calib_frames)
        return self.model

    def submit_command(self, command: dict, reply=None):
        """Queue an operator command; applied between frames."""
        self.commands.put((command, reply))

    def stop(self):
        self._stop = True

    def _drain_commands(self):
        while True:
            try:
                command, reply = self.commands.get_nowait()
            except queue.Empty:
                return
            ack = self._apply_command(command)
            if reply is not None:
                reply(ack)

    def _apply_command(self, command: dict) -> dict:
        kind = command.get("command")
        args = command.get("args") or {}
        try:
            if kind == "stop":
                self._stop = True
            elif kind == "goto_page":
                self.session.goto_page(str(args["page"]))
            elif kind == "set_mapping_mode":
                self.cursor.mode = MappingMode(str(args["mode"]))
            elif kind == "recalibrate":
                self.calibrate()
            elif kind == "load_interface":
                with open(str(args["path"]), "r", encoding="utf-8") as fh:
                    xml = fh.read()
                spec = parse_interface(xml)
                self.spec = spec
                self._interface_xml = xml
                self.session = InterfaceSession(
                    spec, build_lookup(spec, self.config.lookup_cell_size),
                    double_click_ms=self.config.click_double_ms)
            elif kind == "set_param":
                self._set_param(str(args["key"]), str(args["value"]))
            else:
                return {"ok": False, "error": f"unknown command {kind!r}"}
        except (KeyError, ValueError, OSError, ConfigError) as exc:
            return {"ok": False, "error": str(exc)}
        return {"ok": True, "error": None}

    def _set_param(self, key: str, value: str):
        from .config import _SCHEMA  # single source of key names

        if key not in _SCHEMA:
            raise ConfigError(f"unknown parameter {key!r}")
        attr, caster = _SCHEMA[key]
        setattr(self.config, attr, caster(value))
        self.fizi_params = self.config.fizi_params()
        self.track_params = self.config.track_params()
        self.mapping_params = self.config.mapping_params(self.source.dims)
        if key.startswith("click."):
            # new thresholds, same press state and area history
            old = self.detector
            self.detector = self.config.click_detector()
            self.detector.pressed = old.pressed
            self.detector.baseline = old.baseline
            self.detector._history = old._history

    # ------------------------------------------------------------ frames

    def process_frame(self, frame) -> FrameReport:
        if self.model is None:
            raise RuntimeError("process_frame before calibration")
        cfg = self.config
        timings = {}
        errors = []
        self._now_ms = int(round(frame.index * 1000.0 / self.fps))
        t_start = time.perf_counter()

        mask_pixels = 0
        regions = []
        edge = None
        events = ()
        orders = []
        try:
            t0 = time.perf_counter()
            mask = fizi_mask(frame, self.model, self.fizi_params,
                             parallel=cfg.fizi_parallel, workers=cfg.fizi_workers)
            timings["fizi"] = time.perf_counter() - t0
            mask_pixels = int(mask.sum())

            t0 = time.perf_counter()
            regions = label_components(mask, cfg.label_connectivity)
            timings["label"] = time.perf_counter() - t0

            t0 = time.perf_counter()
            track(self.track_state, regions, self.source.dims,
                  self.track_params, frame_index=frame.index)
            timings["track"] = time.perf_counter() - t0

            current = self.track_state.current
            matched = current is not None and self.track_state.frames_lost == 0
            t0 = time.perf_counter()
            if matched:
                apply_mapping(self.cursor, current.centroid,
                              self.mapping_params,
                              (self.spec.width, self.spec.height))
                if isinstance(self.backend, DirectSystemIntegrationBackend):
                    self.backend.move_cursor(self.cursor.x, self.cursor.y)
                edge = self.detector.update_click(current.area)
            timings["map"] = time.perf_counter() - t0

            t0 = time.perf_counter()
            if current is not None:
                interaction = self.session.interact(self.cursor.pos, edge, self._now_ms)
                events = interaction.events
                if interaction.order is not None:
                    orders.append(interaction.order)
            timings["interact"] = time.perf_counter() - t0
        except (ValueError, RuntimeError) as exc:
            errors.append(f"stage: {exc}")
            current = self.track_state.current

        t0 = time.perf_counter()
        for order in orders:
            try:
                self.backend.execute(order)
                if self.recorder is not None:
                    self.recorder.execute(order)
            except (EngineError, ValueError) as exc:
                errors.append(f"engine: {exc}")
        timings["engine"] = time.perf_counter() - t0
        timings["total"] = time.perf_counter() - t_start

        self.frames_processed += 1
        return FrameReport(
            index=frame.index,
            timings=timings,
            mask_pixels=mask_pixels,
            region_count=len(regions),
            region=(RegionSummary(current.area, current.centroid, current.bbox)
                    if current is not None else None),
            tracking_lost=(current is None or self.track_state.frames_lost > 0),
            cursor=self.cursor.pos if current is not None else None,
            pressed=self.detector.pressed,
            page=self.session.page,
            hovered=self.session.hovered,
            edge=edge,
            events=events,
            orders=tuple(orders),
            text=(self.backend.text
                  if isinstance(self.backend, InterfaceControlBackend) else None),
            errors=tuple(errors),
        )

    def run(self, on_report=None) -> RunSummary:
        """Calibrate if needed, then process the source until it ends."""
        if self.model is None:
            self.calibrate()
        summary = RunSummary()
        for frame in self.source.frames():
            self._drain_commands()
            if self._stop:
                break
            report = self.process_frame(frame)
            summary.frames += 1
            summary.orders.extend(report.orders)
            if on_report is not None:
                on_report(report)
            if self.config.max_frames and summary.frames >= self.config.max_frames:
                break
        self._drain_commands()
        if isinstance(self.backend, InterfaceControlBackend):
            summary.text = self.backend.text
        rec = self.recorder if self.recorder is not None else (
            self.backend if isinstance(self.backend, RecorderBackend) else None)
        if rec is not None:
            summary.recorder_lines = list(rec.lines)
        return summary


# ------------------------------------------------------------------ bench

@dataclass
class BenchResult:
    frames: int
    dims: tuple[int, int]
    sequential_fps: float
    parallel_fps: float
    speedup: float
    masks_identical: bool
    stage_means_ms: dict
    workers: int


def _default_bench_script(n_frames: int):
    from .synthetic import GestureScript, HandPose

    poses = []
    for i in range(n_frames):
        angle = 2.0 * np.pi * i / max(n_frames, 1)
        cx = 320 + 140 * np.cos(angle)
        cy = 240 + 90 * np.sin(angle)
        open_ = (i % 20) >= 6
        poses.append(HandPose(cx, cy, 46.0, 54.0, open_))
    return GestureScript(width=640, height=480,
                         distractors=((40, 40, 80, 60), (500, 360, 100, 80)),
                         poses=tuple(poses))


def bench(config: PipelineConfig, n_frames: int = 60, workers: int = 0) -> BenchResult:
    """Measure sequential vs parallel-FIZI throughput on synthetic frames.

    Frames are pre-rendered so only pipeline work is timed; both passes see
    identical inputs and a sample of masks is compared bit for bit.
    """
    from .fizi import default_workers
    from .sources import SyntheticScriptSource

    script = _default_bench_script(n_frames)
    source = SyntheticScriptSource(script, calibration_count=config.calib_frames)
    frames = list(source.frames())
    model = run_calibration(source, config.calib_frames)
    params = config.fizi_params()
    workers = workers or config.fizi_workers or default_workers()

    def timed_pass(parallel: bool):
        cfg = replace_config(config, fizi_parallel=parallel, fizi_workers=workers,
                             backend="ic", recorder_path="")
        pipe = Pipeline(cfg, source, _BENCH_INTERFACE, model=model)
        stage_totals: dict[str, float] = {}
        t0 = time.perf_counter()
        for frame in frames:
            report = pipe.process_frame(frame)
            for stage, dt in report.timings.items():
                stage_totals[stage] = stage_totals.get(stage, 0.0) + dt
        elapsed = time.perf_counter() - t0
        return len(frames) / elapsed, stage_totals

    seq_fps, seq_stages = timed_pass(False)
    par_fps, _ = timed_pass(True)

    identical = all(
        np.array_equal(
            fizi_mask(f, model, params, parallel=False),
            fizi_mask(f, model, params, parallel=True, workers=workers))
        for f in frames[:: max(1, len(frames) // 8)]
    )
    stage_means = {k: 1000.0 * v / len(frames) for k, v in seq_stages.items()}
    return BenchResult(
        frames=len(frames),
        dims=source.dims,
        sequential_fps=seq_fps,
        parallel_fps=par_fps,
        speedup=par_fps / seq_fps,
        masks_identical=identical,
        stage_means_ms=stage_means,
        workers=workers,
    )


def replace_config(cfg: PipelineConfig, **kw) -> PipelineConfig:
    return replace(cfg, **kw)


_BENCH_INTERFACE = """
<interface name="bench" width="640" height="480" start="pad">
  <page id="pad">
    <zone id="pad_area" x="0" y="0" w="640" h="400" label="" action="NOOP"/>
    <zone id="left" x="0" y="410" w="200" h="70" label="left" action="MOUSE_LEFT"/>
    <zone id="right" x="220" y="410" w="200" h="70" label="right" action="MOUSE_RIGHT"/>
  </page>
</interface>
"""
