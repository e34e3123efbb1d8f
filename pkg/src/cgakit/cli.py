"""Command-line entry points: benchmarks, sync simulation, playground, table dump."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import BenchConfig, BenchConfigError, emit_report, run_bench
from .blades import cayley_table_text
from .simulate import (
    ChannelModel,
    MotionModel,
    Pipeline,
    Scene,
    SimulationConfigError,
    SyncReport,
    run_simulation,
)
from .wire import Codec


def _parse_counts(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_pipelines(text: str) -> list[Pipeline]:
    return [Pipeline(part.strip().upper()) for part in text.split(",") if part.strip()]


def _cmd_bench(args) -> int:
    try:
        cfg = BenchConfig(
            object_counts=_parse_counts(args.counts),
            duration_s=args.duration,
            pipelines=_parse_pipelines(args.pipelines),
            warmup_s=args.warmup,
            seed=args.seed,
        )
    except (BenchConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    rows = run_bench(cfg)
    try:
        artifacts = emit_report(rows, args.out, fmt=args.format)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    print(artifacts["table"], end="")
    for path in artifacts["paths"]:
        print(f"wrote {path}")
    return 0


def _cmd_simulate(args) -> int:
    try:
        scene = Scene(object_count=args.objects, motion=MotionModel(), seed=args.seed)
        channel = ChannelModel(
            send_rate_hz={Codec.RAW_POSE: args.pose_rate, Codec.MOTOR16: args.motor_rate},
            latency_ms=args.latency, jitter_ms=args.jitter, seed=args.seed)
        pipelines = _parse_pipelines(args.pipelines)
        reports = [run_simulation(scene, channel, p, args.duration,
                                  render_rate_hz=args.render_rate) for p in pipelines]
    except (SimulationConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for rep in reports:
        print(f"{rep.pipeline}: mean {rep.mean_ms_per_frame:.4f} ms/frame, "
              f"{rep.bytes_per_second:.0f} B/s, max jump {rep.max_discontinuity:.4f}, "
              f"steady allocs {rep.allocations_steady}")
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "sync_reports.jsonl").write_text(
                "".join(rep.to_json_line() + "\n" for rep in reports))
            csv_text = SyncReport.CSV_HEADER + "\n" + \
                "".join(rep.csv_row() + "\n" for rep in reports)
            (out / "sync_reports.csv").write_text(csv_text)
            _simulate_figure(reports, out)
        except OSError as exc:
            print(f"i/o error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {out / 'sync_reports.jsonl'}")
        print(f"wrote {out / 'sync_reports.csv'}")
    return 0


def _simulate_figure(reports, out: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    names = [r.pipeline for r in reports]
    ax1.bar(names, [r.mean_ms_per_frame for r in reports], color="#4878cf")
    ax1.set_ylabel("mean ms per frame")
    ax1.set_title("Interpolation cost")
    ax2.bar(names, [r.bytes_per_second for r in reports], color="#6acc65")
    ax2.set_ylabel("bytes per second")
    ax2.set_title("Bandwidth")
    for ax in (ax1, ax2):
        ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    fig.savefig(out / "sync_report.png", dpi=120)
    plt.close(fig)


def _cmd_playground(args) -> int:
    from . import playground

    if args.stdio:
        playground.serve_stdio()
        return 0
    if args.port is not None:
        try:
            playground.serve_socket(args.port)
        except KeyboardInterrupt:
            pass
        return 0
    print("choose a transport: --stdio or --port N", file=sys.stderr)
    return 2


def _cmd_cayley(args) -> int:
    text = cayley_table_text()
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"i/o error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgakit",
        description="Conformal-geometric-algebra motors: benchmarks, pose sync, playground.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="frame-time benchmark across pipelines")
    b.add_argument("--counts", default="50,100,150,200,250",
                   help="comma-separated object counts")
    b.add_argument("--duration", type=float, default=10.0, help="seconds per cell")
    b.add_argument("--pipelines", default="TRADITIONAL,GA_NAIVE,GA_POOLED")
    b.add_argument("--warmup", type=float, default=2.0, help="discarded warm-up seconds")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", type=Path, default=None, help="directory for report files")
    b.add_argument("--format", choices=("table", "csv", "both"), default="both")
    b.set_defaults(func=_cmd_bench)

    s = sub.add_parser("simulate", help="deterministic sender/receiver pose sync")
    s.add_argument("--objects", type=int, default=50)
    s.add_argument("--pipelines", default="TRADITIONAL,GA_NAIVE,GA_POOLED")
    s.add_argument("--duration", type=float, default=5.0)
    s.add_argument("--latency", type=float, default=50.0, help="channel latency in ms")
    s.add_argument("--jitter", type=float, default=0.0, help="uniform jitter bound in ms")
    s.add_argument("--pose-rate", type=float, default=60.0, help="RAW_POSE send rate (Hz)")
    s.add_argument("--motor-rate", type=float, default=15.0, help="MOTOR16 send rate (Hz)")
    s.add_argument("--render-rate", type=float, default=90.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path, default=None)
    s.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("playground", help="serve the multivector playground protocol")
    p.add_argument("--stdio", action="store_true", help="speak the protocol on stdin/stdout")
    p.add_argument("--port", type=int, default=None, help="listen on a local TCP port")
    p.set_defaults(func=_cmd_playground)

    c = sub.add_parser("cayley", help="dump the blade product table")
    c.add_argument("--out", type=Path, default=None)
    c.set_defaults(func=_cmd_cayley)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
