"""Camera-based gesture control of virtual keyboards and mice.

Frame in, actions out: segmentation (fizi), connected-region tracking
(regions), cursor mapping (mapping), XML-described interfaces (interface),
order execution (engine), all orchestrated per frame by pipeline and
streamed to UI clients by gateway.
"""
from .imaging import Frame, StructuringElement, dilate, erode, mask_and, morph_cleanup, rgb_to_hsv
from .fizi import BackgroundModel, FiziParams, detect_skin, fizi_mask, learn_background, remove_background, remove_grey
from .regions import Region, SelectionPolicy, TrackParams, TrackState, compute_features, label_components, select_master, track
from .mapping import CursorState, MappingMode, MappingParams, map_absolute, map_relative_linear, map_relative_nonlinear
from .interface import ClickDetector, InterfaceSession, InterfaceSpec, build_lookup, hit_test, parse_interface, serialize_interface
from .engine import ActionType, Order, Receipt, encode_action, decode_action, execute, make_backend
from .config import PipelineConfig, load_config, parse_config
from .pipeline import FrameReport, Pipeline, bench, load_background_model, run_calibration, save_background_model

__version__ = "0.1.0"
