"""Flat key=value configuration for the whole pipeline.

One `key=value` per line, '#' starts a comment, unknown keys are rejected
so typos fail fast.  Every module's tunables live here; the dataclass
carries the same defaults the modules use.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

from .fizi import FiziParams
from .interface import ClickDetector
from .mapping import MappingMode, MappingParams, default_active_rect
from .regions import SelectionPolicy, TrackParams


class ConfigError(ValueError):
    pass


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_ranges(raw: str):
    """'0:50,340:360' -> ((0.0, 50.0), (340.0, 360.0))"""
    out = []
    for part in raw.split(","):
        lo, _, hi = part.partition(":")
        out.append((float(lo), float(hi)))
    return tuple(out)


def _parse_range(raw: str):
    lo, _, hi = raw.partition(":")
    return float(lo), float(hi)


@dataclass
class PipelineConfig:
    source: str = ""
    interface: str = ""
    backend: str = "ic"
    mapping_mode: str = "absolute"
    calib_frames: int = 30
    max_frames: int = 0          # 0 = run the source dry

    fizi_k_sigma: float = 2.5
    fizi_tau_min: float = 10.0
    fizi_sigma_min: float = 2.0
    fizi_grey_delta: float = 24.0
    fizi_skin_hue: tuple = ((0.0, 50.0), (340.0, 360.0))
    fizi_skin_s: tuple = (0.15, 0.90)
    fizi_skin_v: tuple = (0.20, 1.00)
    fizi_open_rounds: int = 1
    fizi_close_rounds: int = 2
    fizi_parallel: bool = False
    fizi_workers: int = 0        # 0 = auto

    label_connectivity: int = 8
    select_min_area_fraction: float = 0.005
    track_d_max_fraction: float = 0.2
    track_ratio_lo: float = 0.3
    track_ratio_hi: float = 3.0
    track_max_lost: int = 10
    track_history: int = 15

    map_active_margin: float = 0.1
    map_gain: float = 1.5
    map_nl_alpha: float = 2.0
    map_nl_ref: float = 40.0
    map_smooth: float = 0.0

    click_down_ratio: float = 0.6
    click_up_ratio: float = 0.8
    click_frames: int = 3
    click_window: int = 15
    click_double_ms: int = 600

    lookup_cell_size: int = 4
    gateway_port: int = 8765
    recorder_path: str = ""

    def fizi_params(self) -> FiziParams:
        return FiziParams(
            k_sigma=self.fizi_k_sigma,
            tau_min=self.fizi_tau_min,
            sigma_min=self.fizi_sigma_min,
            grey_chroma_delta=self.fizi_grey_delta,
            skin_hue_ranges=self.fizi_skin_hue,
            skin_s_range=self.fizi_skin_s,
            skin_v_range=self.fizi_skin_v,
            open_rounds=self.fizi_open_rounds,
            close_rounds=self.fizi_close_rounds,
        )

    def track_params(self) -> TrackParams:
        return TrackParams(
            d_max_fraction=self.track_d_max_fraction,
            ratio_lo=self.track_ratio_lo,
            ratio_hi=self.track_ratio_hi,
            max_lost=self.track_max_lost,
            history_len=self.track_history,
            selection=SelectionPolicy(a_min_fraction=self.select_min_area_fraction),
        )

    def mapping_params(self, frame_dims) -> MappingParams:
        w, h = frame_dims
        return MappingParams(
            active_rect=default_active_rect(w, h, self.map_active_margin),
            gain=self.map_gain,
            nl_alpha=self.map_nl_alpha,
            nl_ref=self.map_nl_ref,
            smooth=self.map_smooth,
        )

    def mapping_mode_enum(self) -> MappingMode:
        try:
            return MappingMode(self.mapping_mode)
        except ValueError:
            raise ConfigError(f"unknown mapping mode {self.mapping_mode!r}") from None

    def click_detector(self) -> ClickDetector:
        return ClickDetector(
            down_ratio=self.click_down_ratio,
            up_ratio=self.click_up_ratio,
            m_frames=self.click_frames,
            window=self.click_window,
        )


# config-file key -> (attribute, parser)
_SCHEMA = {
    "source": ("source", str),
    "interface": ("interface", str),
    "backend": ("backend", str),
    "mapping.mode": ("mapping_mode", str),
    "calib.frames": ("calib_frames", int),
    "max.frames": ("max_frames", int),
    "fizi.k_sigma": ("fizi_k_sigma", float),
    "fizi.tau_min": ("fizi_tau_min", float),
    "fizi.sigma_min": ("fizi_sigma_min", float),
    "fizi.grey_delta": ("fizi_grey_delta", float),
    "fizi.skin_hue": ("fizi_skin_hue", _parse_ranges),
    "fizi.skin_s": ("fizi_skin_s", _parse_range),
    "fizi.skin_v": ("fizi_skin_v", _parse_range),
    "fizi.open_rounds": ("fizi_open_rounds", int),
    "fizi.close_rounds": ("fizi_close_rounds", int),
    "fizi.parallel": ("fizi_parallel", _parse_bool),
    "fizi.workers": ("fizi_workers", int),
    "label.connectivity": ("label_connectivity", int),
    "select.min_area_fraction": ("select_min_area_fraction", float),
    "track.d_max_fraction": ("track_d_max_fraction", float),
    "track.ratio_lo": ("track_ratio_lo", float),
    "track.ratio_hi": ("track_ratio_hi", float),
    "track.max_lost": ("track_max_lost", int),
    "track.history": ("track_history", int),
    "map.active_margin": ("map_active_margin", float),
    "map.gain": ("map_gain", float),
    "map.nl_alpha": ("map_nl_alpha", float),
    "map.nl_ref": ("map_nl_ref", float),
    "map.smooth": ("map_smooth", float),
    "click.down_ratio": ("click_down_ratio", float),
    "click.up_ratio": ("click_up_ratio", float),
    "click.frames": ("click_frames", int),
    "click.window": ("click_window", int),
    "click.double_ms": ("click_double_ms", int),
    "lookup.cell_size": ("lookup_cell_size", int),
    "gateway.port": ("gateway_port", int),
    "recorder.path": ("recorder_path", str),
}


def parse_config(text: str) -> PipelineConfig:
    cfg = PipelineConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, caster = _SCHEMA[key]
        try:
            setattr(cfg, attr, caster(value))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    validate_config(cfg)
    return cfg


def load_config(path) -> PipelineConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def validate_config(cfg: PipelineConfig):
    if cfg.calib_frames < 2:
        raise ConfigError("calib.frames must be >= 2")
    if cfg.backend not in ("ic", "dsi", "record"):
        raise ConfigError(f"unknown backend {cfg.backend!r}")
    if cfg.label_connectivity not in (4, 8):
        raise ConfigError("label.connectivity must be 4 or 8")
    cfg.mapping_mode_enum()
    cfg.fizi_params()        # reuses the dataclass validators
    cfg.click_detector()
    return cfg


def dump_config(cfg: PipelineConfig) -> str:
    """Emit the full key=value listing (defaults included)."""
    by_attr = {attr: key for key, (attr, _) in _SCHEMA.items()}
    lines = []
    for f in fields(cfg):
        key = by_attr[f.name]
        value = getattr(cfg, f.name)
        if f.name == "fizi_skin_hue":
            value = ",".join(f"{lo:g}:{hi:g}" for lo, hi in value)
        elif f.name in ("fizi_skin_s", "fizi_skin_v"):
            value = f"{value[0]:g}:{value[1]:g}"
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"
