"""Batch orchestration: suites, convergence statistics, trace persistence, plots.

Suites fan out over (size, instance) grids with a documented seed-splitting
rule: the sub-seed of instance number k in the grid is master_seed XOR k.
Every result file is written atomically (write to a temp name, then rename),
and aggregation runs single-threaded over the completed results.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .dynamics import RunConfig, StepTrace, run_light_cone, run_qaoa_feedback
from .graphs import (
    CutOracleResult,
    Graph,
    brute_force_max_cut,
    enumerate_cubic,
    gen_bipartite,
    gen_erdos_renyi,
    gen_random_regular,
)
from .hamiltonian import build_maxcut

FAMILIES = ("regular3", "erdos_renyi", "bipartite")

TRACE_COLUMNS = (
    "graph_id", "n", "m", "step", "t", "beta", "O", "alpha", "exp_hf",
    "hf_over_m", "lambda_lb", "two_param_lb", "true_ratio", "violation",
)

NOT_REACHED = None


class MissingOracleError(ValueError):
    """A convergence experiment needs the exact optimum for every instance."""


@dataclass(frozen=True)
class SuiteSpec:
    family: str
    n_list: tuple[int, ...]
    instances_per_n: int
    config: RunConfig
    targets: tuple[float, ...] = ()
    p: float = 0.5
    degree: int = 3
    oracle_cap: int = 20
    snapshot_steps: tuple[int, ...] = (10, 100, 1000, 10000)
    exhaustive_cubic: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not self.n_list:
            raise ValueError("n_list must be nonempty")
        if self.instances_per_n < 1:
            raise ValueError("instances_per_n must be >= 1")
        if any(not 0 < t < 1 for t in self.targets):
            raise ValueError(f"targets must lie in (0, 1), got {self.targets}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class ConvergenceRecord:
    graph_id: str
    n: int
    target: float
    rounds_to_target: Optional[int]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    which: str
    n_points: int
    excluded: int


@dataclass(frozen=True)
class PlotSeries:
    label: str
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    style: str = "scatter"  # scatter | line | bar

    def __post_init__(self) -> None:
        if len(self.xs) != len(self.ys):
            raise ValueError(f"series {self.label!r}: {len(self.xs)} xs vs {len(self.ys)} ys")
        if self.style not in ("scatter", "line", "bar"):
            raise ValueError(f"unknown style {self.style!r}")


def suite_instances(spec: SuiteSpec):
    """Yield (graph_id, graph) pairs for the grid, deterministically seeded."""
    if spec.exhaustive_cubic:
        if spec.family != "regular3":
            raise ValueError("exhaustive enumeration only applies to the cubic family")
        for n in spec.n_list:
            for k, g in enumerate(enumerate_cubic(n, seed=spec.config.seed)):
                yield f"{spec.family}_n{n:02d}_i{k:02d}", g
        return
    counter = 0
    for n in spec.n_list:
        for k in range(spec.instances_per_n):
            sub_seed = spec.config.seed ^ counter
            counter += 1
            if spec.family == "regular3":
                g = gen_random_regular(n, spec.degree, seed=sub_seed)
            elif spec.family == "erdos_renyi":
                g = gen_erdos_renyi(n, spec.p, seed=sub_seed)
            else:
                g = gen_bipartite((n + 1) // 2, n // 2, spec.p, seed=sub_seed)
            yield f"{spec.family}_n{n:02d}_i{k:02d}", g


def run_instance(
    g: Graph,
    cfg: RunConfig,
    oracle: Optional[CutOracleResult] = None,
    stop_at_true_ratio: Optional[float] = None,
) -> list[StepTrace]:
    h = build_maxcut(g, cap=cfg.state_cap)
    runner = run_qaoa_feedback if cfg.ansatz == "qaoa_feedback" else run_light_cone
    return runner(g, h, cfg, oracle, stop_at_true_ratio=stop_at_true_ratio)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    return repr(value) if isinstance(value, float) else str(value)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_trace_csv(path: Path, graph_id: str, g: Graph, traces: Sequence[StepTrace]) -> None:
    lines = [",".join(TRACE_COLUMNS)]
    for tr in traces:
        lines.append(",".join([
            graph_id, str(g.n), str(g.m), str(tr.step), _fmt(tr.t), _fmt(tr.beta),
            _fmt(tr.O), _fmt(tr.alpha), _fmt(tr.hf_exp), _fmt(tr.hf_over_m),
            _fmt(tr.lambda_lb), _fmt(tr.two_param_lb), _fmt(tr.true_ratio),
            _fmt(tr.violation),
        ]))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_trace_csv(path: Path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace columns in {path}: {header}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            row = dict(zip(TRACE_COLUMNS, parts))
            for key in ("n", "m", "step"):
                row[key] = int(row[key])
            for key in ("t", "beta", "O", "alpha", "exp_hf", "hf_over_m", "lambda_lb", "two_param_lb"):
                row[key] = float(row[key])
            row["true_ratio"] = float(row["true_ratio"]) if row["true_ratio"] else None
            row["violation"] = row["violation"] == "1"
            rows.append(row)
    return rows


def _summary_dict(graph_id: str, g: Graph, spec: SuiteSpec, oracle, traces: Sequence[StepTrace]) -> dict:
    last = traces[-1]
    return {
        "graph_id": graph_id,
        "family": spec.family,
        "n": g.n,
        "m": g.m,
        "parts": [(g.n + 1) // 2, g.n // 2] if spec.family == "bipartite" else None,
        "graph_hash": g.content_hash(),
        "config": dataclasses.asdict(spec.config),
        "oracle": None if oracle is None else {
            "optimum": oracle.optimum,
            "one_maximizer": format(oracle.maximizers[0], f"0{g.n}b")[::-1],
        },
        "final": {
            "step": last.step,
            "t": last.t,
            "exp_hf": last.hf_exp,
            "hf_over_m": last.hf_over_m,
            "lambda_lb": last.lambda_lb,
            "two_param_lb": last.two_param_lb,
            "true_ratio": last.true_ratio,
        },
        "violations": sum(1 for tr in traces if tr.violation),
    }


def _suite_worker(task):
    graph_id, g, cfg, oracle_cap = task
    oracle = brute_force_max_cut(g) if g.n <= oracle_cap else None
    return graph_id, g, oracle, run_instance(g, cfg, oracle)


def run_suite(spec: SuiteSpec, output_dir) -> dict:
    """Run every instance of the grid; write trace CSV and summary JSON per
    instance plus snapshot aggregates, and return the manifest.

    With workers > 1 the simulations fan out over a process pool; each run
    only touches immutable inputs, and all file writes and the aggregation
    stay in this thread, in grid order.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = []
    skipped = []
    for graph_id, g in suite_instances(spec):
        if g.n > spec.config.state_cap:
            skipped.append({"graph_id": graph_id, "reason": f"n={g.n} above state cap {spec.config.state_cap}"})
            continue
        tasks.append((graph_id, g, spec.config, spec.oracle_cap))

    if spec.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            completed = list(pool.map(_suite_worker, tasks))
    else:
        completed = [_suite_worker(t) for t in tasks]

    results = []
    for graph_id, g, oracle, traces in completed:
        write_trace_csv(out / f"{graph_id}.csv", graph_id, g, traces)
        summary = _summary_dict(graph_id, g, spec, oracle, traces)
        _atomic_write(out / f"{graph_id}.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
        results.append((graph_id, g, traces))

    snapshots = sorted(s for s in set(spec.snapshot_steps) if 1 <= s <= spec.config.rounds)
    agg_lines = ["family,n,step,instances,mean_true_ratio,mean_lambda_lb,mean_two_param_lb,mean_hf_over_m"]
    for n in spec.n_list:
        group = [(gid, g, tr) for gid, g, tr in results if g.n == n]
        if not group:
            continue
        for s in snapshots:
            rows = [tr[s - 1] for _, _, tr in group if len(tr) >= s]
            if not rows:
                continue
            ratios = [r.true_ratio for r in rows if r.true_ratio is not None]
            mean_ratio = sum(ratios) / len(ratios) if ratios else None
            agg_lines.append(",".join([
                spec.family, str(n), str(s), str(len(rows)), _fmt(mean_ratio),
                _fmt(sum(r.lambda_lb for r in rows) / len(rows)),
                _fmt(sum(r.two_param_lb for r in rows) / len(rows)),
                _fmt(sum(r.hf_over_m for r in rows) / len(rows)),
            ]))
    _atomic_write(out / "aggregates.csv", "\n".join(agg_lines) + "\n")

    manifest = {
        "family": spec.family,
        "instances": [gid for gid, _, _ in results],
        "skipped": skipped,
        "aggregates": "aggregates.csv",
    }
    _atomic_write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def convergence_experiment(spec: SuiteSpec, targets: Sequence[float]) -> list[ConvergenceRecord]:
    """First round at which each instance reaches each target true ratio."""
    targets = tuple(sorted(targets))
    if not targets:
        raise ValueError("need at least one target")
    records = []
    for graph_id, g in suite_instances(spec):
        if g.n > spec.oracle_cap:
            raise MissingOracleError(f"{graph_id}: n={g.n} beyond oracle cap {spec.oracle_cap}")
        oracle = brute_force_max_cut(g)
        traces = run_instance(g, spec.config, oracle, stop_at_true_ratio=targets[-1])
        for target in targets:
            hit = next((tr.step for tr in traces if tr.true_ratio >= target), NOT_REACHED)
            records.append(ConvergenceRecord(graph_id=graph_id, n=g.n, target=target, rounds_to_target=hit))
    return records


def percentile(values: Sequence[float], q: float) -> float:
    """Linear interpolation between closest ranks."""
    if not len(values):
        raise ValueError("percentile of empty input")
    if not 0 <= q <= 100:
        raise ValueError(f"q must be in [0, 100], got {q}")
    ordered = sorted(values)
    pos = (len(ordered) - 1) * q / 100.0
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return float(ordered[lo])
    frac = pos - lo
    return float(ordered[lo] * (1 - frac) + ordered[hi] * frac)


def _ols(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("degenerate fit: no spread in x")
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    return slope, my - slope * mx


def fit_loglog(
    records: Sequence[ConvergenceRecord],
    which: str = "all_points",
    q: Optional[float] = None,
) -> FitResult:
    """OLS of log10(rounds) against log10(n).

    Not-reached records are excluded up front and reported in the result.
    Variants: per_n_max fits the worst instance per size, per_n_quartile fits
    the q-th percentile per size.
    """
    reached = [r for r in records if r.rounds_to_target is not NOT_REACHED]
    excluded = len(records) - len(reached)
    if len({r.n for r in reached}) < 2:
        raise ValueError("degenerate fit: need at least two distinct sizes with reached targets")

    if which == "all_points":
        pts = [(math.log10(r.n), math.log10(r.rounds_to_target)) for r in reached]
    elif which == "per_n_max":
        pts = []
        for n in sorted({r.n for r in reached}):
            worst = max(r.rounds_to_target for r in reached if r.n == n)
            pts.append((math.log10(n), math.log10(worst)))
    elif which == "per_n_quartile":
        if q is None:
            raise ValueError("per_n_quartile needs q")
        pts = []
        for n in sorted({r.n for r in reached}):
            rounds = [r.rounds_to_target for r in reached if r.n == n]
            pts.append((math.log10(n), math.log10(percentile(rounds, q))))
        which = f"per_n_quartile({q:g})"
    else:
        raise ValueError(f"unknown fit variant {which!r}")

    slope, intercept = _ols([p[0] for p in pts], [p[1] for p in pts])
    return FitResult(slope=slope, intercept=intercept, which=which, n_points=len(pts), excluded=excluded)


# --- SVG emission -----------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
_W, _H = 760, 480
_ML, _MR, _MT, _MB = 72, 24, 36, 56


def _ticks_linear(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def emit_plot(series: Sequence[PlotSeries], kind: str, path) -> Path:
    """Render series to a self-contained SVG plus a raw CSV next to it.

    kind 'loglog_scatter' draws on log10 axes with decade ticks; 'ratio_bars'
    draws grouped bars at categorical x positions with a [0, 1] y axis.
    """
    if kind not in ("ratio_bars", "loglog_scatter"):
        raise ValueError(f"unknown plot kind {kind!r}")
    series = list(series)
    if not series or all(len(s.xs) == 0 for s in series):
        raise ValueError("nothing to plot: empty series")
    path = Path(path)

    csv_lines = ["series,x,y"]
    for s in series:
        for x, y in zip(s.xs, s.ys):
            csv_lines.append(f"{escape(s.label)},{_fmt(float(x))},{_fmt(float(y))}")
    _atomic_write(path.with_suffix(".csv"), "\n".join(csv_lines) + "\n")

    # Transform every series into plain numeric plot coordinates.
    if kind == "loglog_scatter":
        points = [[(math.log10(x), math.log10(y)) for x, y in zip(s.xs, s.ys)] for s in series]
        categories = None
    else:
        categories = sorted({float(x) for s in series for x in s.xs})
        ordinal = {x: i for i, x in enumerate(categories)}
        points = [[(float(ordinal[float(x)]), float(y)) for x, y in zip(s.xs, s.ys)] for s in series]

    all_x = [p[0] for pts in points for p in pts]
    all_y = [p[1] for pts in points for p in pts]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if kind == "ratio_bars":
        x_lo, x_hi = -0.6, len(categories) - 0.4
        y_lo, y_hi = 0.0, max(1.0, y_hi)
    pad_x = 0.05 * (x_hi - x_lo or 1.0)
    pad_y = 0.05 * (y_hi - y_lo or 1.0)
    x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    plot_w = _W - _ML - _MR
    plot_h = _H - _MT - _MB

    def px(v: float) -> float:
        return _ML + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return _MT + (y_hi - v) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#404040"/>',
    ]

    if kind == "loglog_scatter":
        x_ticks = [(float(t), f"1e{t}") for t in range(math.floor(x_lo), math.ceil(x_hi) + 1)]
        y_ticks = [(float(t), f"1e{t}") for t in range(math.floor(y_lo), math.ceil(y_hi) + 1)]
    else:
        x_ticks = [(float(i), f"{c:g}") for i, c in enumerate(categories)]
        y_ticks = [(t, f"{t:.2f}") for t in _ticks_linear(0.0, max(1.0, y_hi - pad_y))]

    for t, label in x_ticks:
        if not x_lo <= t <= x_hi:
            continue
        parts.append(f'<line x1="{px(t):.1f}" y1="{_MT}" x2="{px(t):.1f}" y2="{_MT + plot_h}" stroke="#d9d9d9"/>')
        parts.append(
            f'<text x="{px(t):.1f}" y="{_MT + plot_h + 18}" font-size="11" text-anchor="middle">{label}</text>'
        )
    for t, label in y_ticks:
        if not y_lo <= t <= y_hi:
            continue
        parts.append(f'<line x1="{_ML}" y1="{py(t):.1f}" x2="{_ML + plot_w}" y2="{py(t):.1f}" stroke="#d9d9d9"/>')
        parts.append(
            f'<text x="{_ML - 6}" y="{py(t) + 4:.1f}" font-size="11" text-anchor="end">{label}</text>'
        )

    n_series = len(series)
    for si, (s, pts) in enumerate(zip(series, points)):
        color = _PALETTE[si % len(_PALETTE)]
        if s.style == "bar":
            bar_w = 0.8 / n_series * (plot_w / (x_hi - x_lo))
            baseline = py(0.0)
            for cx, y in pts:
                left = px(cx - 0.4) + si * bar_w
                top = py(y)
                parts.append(
                    f'<rect x="{left:.1f}" y="{top:.1f}" width="{bar_w:.1f}" '
                    f'height="{baseline - top:.1f}" fill="{color}" fill-opacity="0.85"/>'
                )
        elif s.style == "line":
            joined = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in pts)
            parts.append(f'<polyline points="{joined}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        else:
            for x, y in pts:
                parts.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3.2" fill="{color}" fill-opacity="0.8"/>')

    legend_y = _MT + 14
    for si, s in enumerate(series):
        color = _PALETTE[si % len(_PALETTE)]
        parts.append(f'<rect x="{_ML + 10}" y="{legend_y - 9 + si * 16}" width="10" height="10" fill="{color}"/>')
        parts.append(
            f'<text x="{_ML + 25}" y="{legend_y + si * 16}" font-size="11">{escape(s.label)}</text>'
        )
    parts.append("</svg>")
    _atomic_write(path, "\n".join(parts) + "\n")
    return path
