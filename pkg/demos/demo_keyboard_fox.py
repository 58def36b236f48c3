"""Type 'fox' on the paged virtual keyboard with a scripted hand.

The checked-in gesture script presses F on the letters page, switches to
the N-Z page, then presses O and X.  Prints the per-frame event stream and
the growing text buffer.
"""
from importlib import resources

from handwave.config import PipelineConfig
from handwave.engine import RecorderBackend
from handwave.pipeline import Pipeline
from handwave.sources import SyntheticScriptSource

DATA = resources.files("handwave").joinpath("data")

cfg = PipelineConfig(backend="ic")
source = SyntheticScriptSource.from_file(str(DATA / "fox.script"),
                                         calibration_count=cfg.calib_frames)
pipe = Pipeline(cfg, source, DATA.joinpath("keyboard.xml").read_text(),
                recorder=RecorderBackend(clock=lambda: pipe._now_ms))

print("calibrating on 30 background frames, then running the gesture...")
last_text = ""


def show(report):
    global last_text
    for event in report.events:
        print(f"  frame {report.index:>3}  {event.kind:<5} {event.zone} "
              f"({event.page})")
    if report.edge:
        print(f"  frame {report.index:>3}  click {report.edge.upper()} on "
              f"{report.hovered or 'page-switch'}")
    if report.text != last_text:
        print(f"  frame {report.index:>3}  text buffer -> {report.text!r}")
        last_text = report.text


summary = pipe.run(on_report=show)
print(f"\ntyped: {summary.text!r} in {summary.frames} frames")
print("recorder log (seq, t_ms, type, p1, p2):")
for line in pipe.recorder.lines:
    print(" ", line.replace("\t", "  "))
