"""Command line entry points: run, calibrate, bench."""
from __future__ import annotations

import argparse
import os
import sys
import time
from importlib import resources

from .config import ConfigError, PipelineConfig, load_config
from .pipeline import Pipeline, bench, run_calibration, save_background_model
from .sources import SourceError, open_source


def bundled_interface(name: str = "keyboard") -> str:
    return resources.files("handwave").joinpath(f"data/{name}.xml").read_text()


def _load_interface_xml(path: str) -> str:
    if not path:
        return bundled_interface("keyboard")
    if path in ("keyboard", "mousepad"):
        return bundled_interface(path)
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="handwave",
        description="Gesture-controlled virtual keyboard/mouse pipeline",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    run_p = sub.add_parser("run", help="calibrate then process the source")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--source", help="script:<file> | seq:<dir> | camera:<id>")
    run_p.add_argument("--interface", help="interface XML path, or keyboard|mousepad")
    run_p.add_argument("--backend", choices=["ic", "dsi", "record"])
    run_p.add_argument("--mapping", choices=["absolute", "linear", "nonlinear"])
    run_p.add_argument("--headless", action="store_true",
                       help="do not serve the gateway")
    run_p.add_argument("--frames", type=int, help="stop after N frames")
    run_p.add_argument("--port", type=int, help="gateway port (default from config)")

    cal_p = sub.add_parser("calibrate", help="learn and save a background model")
    cal_p.add_argument("--config", required=True)
    cal_p.add_argument("--frames", type=int, required=True)
    cal_p.add_argument("--out", required=True)
    cal_p.add_argument("--source", help="override the configured source")

    bench_p = sub.add_parser("bench", help="measure pipeline throughput")
    bench_p.add_argument("--config", required=True)
    bench_p.add_argument("--frames", type=int, default=90)
    bench_p.add_argument("--workers", type=int, default=0)
    return parser


def _configure(args) -> tuple[PipelineConfig, str]:
    config = load_config(args.config)
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = fh.read()
    if getattr(args, "source", None):
        config.source = args.source
    if getattr(args, "interface", None):
        config.interface = args.interface
    if getattr(args, "backend", None):
        config.backend = args.backend
    if getattr(args, "mapping", None):
        config.mapping_mode = args.mapping
    elif config.backend == "dsi" and "mapping.mode" not in raw:
        config.mapping_mode = "nonlinear"  # the usual choice for mouse emulation
    if getattr(args, "frames", None):
        config.max_frames = args.frames
    if getattr(args, "port", None) is not None:
        config.gateway_port = args.port  # 0 binds an ephemeral port
    return config, raw


def cmd_run(args) -> int:
    config, _ = _configure(args)
    if not config.source:
        print("run: no source configured (use --source or source= in config)",
              file=sys.stderr)
        return 2
    source = open_source(config.source, calibration_count=config.calib_frames)
    xml = _load_interface_xml(config.interface)
    pipeline = Pipeline(config, source, xml)

    service = None
    on_report = None
    if not args.headless:
        from .gateway import serve

        service = serve(pipeline, port=config.gateway_port)
        on_report = service.publish
        print(f"gateway listening on ws://127.0.0.1:{service.port}", flush=True)

    t0 = time.perf_counter()
    try:
        summary = pipeline.run(on_report=on_report)
    finally:
        if service is not None:
            service.stop()
    elapsed = time.perf_counter() - t0

    fps = summary.frames / elapsed if elapsed > 0 else 0.0
    print(f"processed {summary.frames} frames in {elapsed:.2f}s ({fps:.1f} fps)")
    print(f"orders executed: {len(summary.orders)}")
    if summary.text is not None:
        print(f"text buffer: {summary.text!r}")
    if summary.recorder_lines:
        dump = "\n".join(summary.recorder_lines) + "\n"
        if config.recorder_path and config.recorder_path != "-":
            with open(config.recorder_path, "w", encoding="utf-8") as fh:
                fh.write(dump)
            print(f"recorder log written to {config.recorder_path}")
        else:
            sys.stdout.write(dump)
    return 0


def cmd_calibrate(args) -> int:
    config, _ = _configure(args)
    if not config.source:
        print("calibrate: no source configured", file=sys.stderr)
        return 2
    source = open_source(config.source, calibration_count=args.frames)
    model = run_calibration(source, args.frames)
    save_background_model(model, args.out)
    w, h = model.dims
    print(f"model {w}x{h} from {model.sample_count} frames -> {args.out}")
    return 0


def cmd_bench(args) -> int:
    config, _ = _configure(args)
    result = bench(config, n_frames=args.frames, workers=args.workers)
    w, h = result.dims
    print(f"bench: {result.frames} frames at {w}x{h}, "
          f"{result.workers} workers for the parallel pass")
    print(f"{'stage':<10} {'mean ms':>9}")
    for stage, ms in sorted(result.stage_means_ms.items(),
                            key=lambda kv: -kv[1]):
        print(f"{stage:<10} {ms:>9.2f}")
    print(f"sequential: {result.sequential_fps:.1f} fps")
    print(f"parallel:   {result.parallel_fps:.1f} fps "
          f"(speedup x{result.speedup:.2f}, cores={os.cpu_count()})")
    print(f"masks identical: {result.masks_identical}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.cmd == "run":
            return cmd_run(args)
        if args.cmd == "calibrate":
            return cmd_calibrate(args)
        if args.cmd == "bench":
            return cmd_bench(args)
    except (ConfigError, SourceError, FileNotFoundError, ValueError) as exc:
        print(f"{args.cmd}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
