"""Run the fox scenario with the gateway serving, and watch it as a client.

Starts the pipeline with a WebSocket gateway on an ephemeral port, connects
the bundled client, issues a live set_mapping_mode command mid-run, and
prints the streamed messages.  This is exactly what the browser front panel
consumes.
"""
import threading
import time
from importlib import resources

from handwave.config import PipelineConfig
from handwave.gateway import GatewayClient, serve
from handwave.pipeline import Pipeline
from handwave.sources import SyntheticScriptSource

DATA = resources.files("handwave").joinpath("data")

cfg = PipelineConfig(backend="ic")
source = SyntheticScriptSource.from_file(str(DATA / "fox.script"),
                                         calibration_count=cfg.calib_frames)
pipe = Pipeline(cfg, source, DATA.joinpath("keyboard.xml").read_text())
service = serve(pipe, port=0)
print(f"gateway on ws://127.0.0.1:{service.port}")

client = GatewayClient("127.0.0.1", service.port)
seen = []


def watch():
    while True:
        try:
            msg = client.recv_json()
        except Exception:
            return
        seen.append(msg)
        if msg["type"] in ("hello", "order_executed", "text_buffer",
                           "click_event", "command_ack"):
            print(f"  <- {msg}")
        elif msg["type"] == "spec":
            print(f"  <- spec: {len(msg['pages'])} pages, "
                  f"{sum(len(p['zones']) for p in msg['pages'])} zones")


watcher = threading.Thread(target=watch, daemon=True)
watcher.start()

runner = threading.Thread(target=lambda: pipe.run(on_report=service.publish))
runner.start()
time.sleep(1.0)
print("  -> switching mapping mode while the pipeline runs")
client.send_json({"type": "command", "command": "set_mapping_mode",
                  "args": {"mode": "absolute"}})
runner.join()
time.sleep(0.5)
service.stop()
watcher.join(timeout=3)

cursors = sum(1 for m in seen if m["type"] == "cursor")
print(f"\nstream totals: {len(seen)} messages, {cursors} cursor updates")
