"""Drive the mouse-pad interface in mouse-emulation (DSI) mode.

A scripted hand moves over the pad, clicks LEFT twice in quick succession
(the second press is synthesized into a double click), then scrolls the
wheel.  The DSI backend logs the OS calls a real injector would make.
"""
from importlib import resources

from handwave.config import PipelineConfig
from handwave.engine import DirectSystemIntegrationBackend, LoggingInjector
from handwave.pipeline import Pipeline
from handwave.sources import SyntheticScriptSource
from handwave.synthetic import GestureScript, HandPose

DATA = resources.files("handwave").joinpath("data")

# hand positions that map (absolute) onto the LEFT button and WHEEL+ zones
LEFT = (136.0, 336.0)
WHEEL_UP = (504.0, 332.0)


def press(pos, frames_open=4, frames_closed=4):
    return [HandPose(*pos, 46.0, 54.0, True)] * frames_open + \
           [HandPose(*pos, 46.0, 54.0, False)] * frames_closed


poses = press(LEFT) + press(LEFT)          # two quick presses -> double click
poses += [HandPose(*WHEEL_UP, 46.0, 54.0, True)] * 6
poses += press(WHEEL_UP)
script = GestureScript(poses=tuple(poses))

cfg = PipelineConfig(backend="dsi", mapping_mode="absolute")
source = SyntheticScriptSource(script, calibration_count=cfg.calib_frames)
injector = LoggingInjector()
pipe = Pipeline(cfg, source, DATA.joinpath("mousepad.xml").read_text(),
                backend=DirectSystemIntegrationBackend(injector=injector))

summary = pipe.run()
print(f"{summary.frames} frames processed; injector calls (moves elided):")
moves = 0
for call in injector.calls:
    if call.startswith("move"):
        moves += 1
        continue
    print(f"  {call}")
print(f"  ... plus {moves} cursor moves")
print("\nthe second LEFT press within 600 ms became 'button double'")
