"""Frame-time benchmark: N objects interpolated continuously per pipeline.

The workload regenerates each object's pose pair every half simulated second
(outside the timed region, like message processing would be) and times the
per-frame interpolation batch only.  Frames inside the warm-up window are
discarded so pool growth and cache effects stay out of the steady-state
numbers.  Reports go out as an aligned text table, a CSV with a fixed header,
and matplotlib figures rendered next to the CSV.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .interp import FreshInterpolator, InterpolationContext, conventional_interpolate
from .pool import AllocationMeter, MultivectorPool
from .simulate import MotionModel, Pipeline, Scene

CSV_HEADER = ("count,pipeline,mean_ms,median_ms,p95_ms,allocs,"
              "improvement_vs_naive_pct,improvement_vs_traditional_pct")

_SEGMENT_S = 0.5


class BenchConfigError(ValueError):
    pass


@dataclass
class BenchConfig:
    object_counts: list = field(default_factory=lambda: [50, 100, 150, 200, 250])
    duration_s: float = 10.0
    pipelines: list = field(default_factory=lambda: list(Pipeline))
    warmup_s: float = 2.0
    seed: int = 0
    render_rate_hz: float = 90.0

    def __post_init__(self):
        self.pipelines = [Pipeline(p) for p in self.pipelines]
        if not self.pipelines:
            raise BenchConfigError("at least one pipeline is required")
        if any(c < 1 for c in self.object_counts) or not self.object_counts:
            raise BenchConfigError("object counts must be positive")
        if self.duration_s < self.warmup_s:
            raise BenchConfigError("duration must cover the warm-up window")


@dataclass
class BenchRow:
    count: int
    pipeline: str
    mean_ms: float
    median_ms: float
    p95_ms: float
    allocs: int


class _TraditionalPair:
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def rebind(self, a, b):
        self.a, self.b = a, b

    def interpolate(self, alpha):
        return conventional_interpolate(self.a, self.b, alpha)


def _measure_cell(pipeline: Pipeline, count: int, cfg: BenchConfig) -> BenchRow:
    scene = Scene(count, MotionModel(), seed=cfg.seed)
    pool = MultivectorPool(capacity=max(128, count * 12), grow_increment=32)
    meter = AllocationMeter()

    def endpoints(seg):
        t0 = seg * _SEGMENT_S
        return ([scene.pose_at(i, t0) for i in range(count)],
                [scene.pose_at(i, t0 + _SEGMENT_S) for i in range(count)])

    a0, b0 = endpoints(0)
    if pipeline is Pipeline.GA_POOLED:
        drivers = [InterpolationContext(a0[i], b0[i], pool=pool) for i in range(count)]
    elif pipeline is Pipeline.GA_NAIVE:
        drivers = [FreshInterpolator(a0[i], b0[i], meter=meter) for i in range(count)]
    else:
        drivers = [_TraditionalPair(a0[i], b0[i]) for i in range(count)]

    frames_per_segment = max(1, int(round(_SEGMENT_S * cfg.render_rate_hz)))
    total_frames = int(round(cfg.duration_s * cfg.render_rate_hz))
    warmup_frames = int(round(cfg.warmup_s * cfg.render_rate_hz))
    frame_ms: list[float] = []
    allocs_at_warmup = 0

    frame = 0
    seg = 0
    while frame < total_frames:
        if frame and frame % frames_per_segment == 0:
            seg += 1
            a, b = endpoints(seg)
            for i, drv in enumerate(drivers):
                if pipeline is Pipeline.TRADITIONAL:
                    drv.rebind(a[i], b[i])
                else:
                    # contiguous segments: the new start pose is the old end pose
                    drv.advance(b[i])
        alpha = (frame % frames_per_segment) / frames_per_segment
        t0 = time.perf_counter()
        for drv in drivers:
            drv.interpolate(alpha)
        frame_ms.append((time.perf_counter() - t0) * 1000.0)
        frame += 1
        if frame == warmup_frames:
            allocs_at_warmup = pool.allocation_count if pipeline is Pipeline.GA_POOLED \
                else meter.count

    if pipeline is Pipeline.GA_POOLED:
        allocs = pool.allocation_count - allocs_at_warmup
        for drv in drivers:
            drv.close()
    elif pipeline is Pipeline.GA_NAIVE:
        allocs = meter.count - allocs_at_warmup
    else:
        allocs = 0

    steady = frame_ms[warmup_frames:] or frame_ms
    arr = np.array(steady)
    return BenchRow(
        count=count,
        pipeline=pipeline.value,
        mean_ms=float(arr.mean()),
        median_ms=float(np.median(arr)),
        p95_ms=float(np.percentile(arr, 95)),
        allocs=int(allocs),
    )


def run_bench(cfg: BenchConfig) -> list[BenchRow]:
    rows = []
    for count in cfg.object_counts:
        for pipeline in cfg.pipelines:
            rows.append(_measure_cell(pipeline, count, cfg))
    return rows


# ---------------------------------------------------------------------------
# reporting


def _improvements(rows: list[BenchRow]) -> dict[tuple[int, str], tuple[float | None, float | None]]:
    by_cell = {(r.count, r.pipeline): r for r in rows}
    out = {}
    for r in rows:
        naive = by_cell.get((r.count, Pipeline.GA_NAIVE.value))
        trad = by_cell.get((r.count, Pipeline.TRADITIONAL.value))
        vs_naive = None
        vs_trad = None
        if r.pipeline == Pipeline.GA_POOLED.value and naive and naive.mean_ms > 0:
            vs_naive = (naive.mean_ms - r.mean_ms) / naive.mean_ms * 100.0
        if r.pipeline != Pipeline.TRADITIONAL.value and trad and trad.mean_ms > 0:
            vs_trad = (trad.mean_ms - r.mean_ms) / trad.mean_ms * 100.0
        out[(r.count, r.pipeline)] = (vs_naive, vs_trad)
    return out


def _fmt_pct(v: float | None) -> str:
    return "" if v is None else f"{v:.1f}"


def format_table(rows: list[BenchRow]) -> str:
    if not rows:
        raise BenchConfigError("no benchmark rows to report")
    imp = _improvements(rows)
    header = ["count", "pipeline", "mean_ms", "median_ms", "p95_ms", "allocs",
              "vs_naive_%", "vs_traditional_%"]
    table = [header]
    for r in rows:
        vn, vt = imp[(r.count, r.pipeline)]
        table.append([str(r.count), r.pipeline, f"{r.mean_ms:.4f}", f"{r.median_ms:.4f}",
                      f"{r.p95_ms:.4f}", str(r.allocs), _fmt_pct(vn), _fmt_pct(vt)])
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def format_csv(rows: list[BenchRow]) -> str:
    if not rows:
        raise BenchConfigError("no benchmark rows to report")
    imp = _improvements(rows)
    lines = [CSV_HEADER]
    for r in rows:
        vn, vt = imp[(r.count, r.pipeline)]
        lines.append(f"{r.count},{r.pipeline},{r.mean_ms:.6f},{r.median_ms:.6f},"
                     f"{r.p95_ms:.6f},{r.allocs},{_fmt_pct(vn)},{_fmt_pct(vt)}")
    return "\n".join(lines) + "\n"


def render_figures(rows: list[BenchRow], out_dir: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    pipelines = sorted({r.pipeline for r in rows})
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for pipe in pipelines:
        cells = sorted((r.count, r.mean_ms) for r in rows if r.pipeline == pipe)
        ax.plot([c for c, _ in cells], [m for _, m in cells], marker="o", label=pipe)
    ax.set_xlabel("interpolated objects")
    ax.set_ylabel("mean ms per frame")
    ax.set_title("Interpolation cost per frame")
    ax.grid(True, alpha=0.3)
    ax.legend()
    p = out_dir / "bench_frame_times.png"
    fig.tight_layout()
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for pipe in pipelines:
        cells = sorted((r.count, r.allocs) for r in rows if r.pipeline == pipe)
        ax.plot([c for c, _ in cells], [m for _, m in cells], marker="s", label=pipe)
    ax.set_xlabel("interpolated objects")
    ax.set_ylabel("post-warmup buffer allocations")
    ax.set_title("Allocation behaviour")
    ax.grid(True, alpha=0.3)
    ax.legend()
    p = out_dir / "bench_allocations.png"
    fig.tight_layout()
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)
    return paths


def emit_report(rows: list[BenchRow], out_dir: Path | None, fmt: str = "both",
                figures: bool = True) -> dict:
    """Write table/CSV/figures; returns the artifact paths and rendered table."""
    if fmt not in ("table", "csv", "both"):
        raise BenchConfigError(f"unknown format {fmt!r}")
    table = format_table(rows)
    csv_text = format_csv(rows)
    artifacts: dict = {"table": table, "csv": csv_text, "paths": []}
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt in ("table", "both"):
            p = out_dir / "bench_report.txt"
            p.write_text(table)
            artifacts["paths"].append(p)
        if fmt in ("csv", "both"):
            p = out_dir / "bench_report.csv"
            p.write_text(csv_text)
            artifacts["paths"].append(p)
        if figures:
            artifacts["paths"].extend(render_figures(rows, out_dir))
    return artifacts
