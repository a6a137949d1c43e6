"""CSV and SVG writers for run results."""

from __future__ import annotations

import csv
import html
import math
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .engine import RunResult
from .errors import EmptySeries


def format_float(x: float) -> str:
    """Shortest text that parses back to the same double."""
    return repr(float(x))


def write_csv(result: RunResult, path, names: Optional[Sequence[str]] = None) -> None:
    names = list(result.series) if names is None else list(names)
    cols = [result.series[n] for n in names]
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", *names])
            for i, t in enumerate(result.times):
                w.writerow([format_float(t), *(format_float(c[i]) for c in cols)])
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc.strerror or exc}") from exc


def read_csv(path) -> RunResult:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in row] for row in body]).reshape(len(body), len(header))
    series = {name: data[:, j].copy() for j, name in enumerate(header[1:], start=1)}
    return RunResult(times=data[:, 0].copy(), series=series, metadata={"source": str(path)})


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
MAX_POINTS = 2000


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_chart(series: Mapping[str, Sequence[float]], path, *, times: Optional[Sequence[float]] = None,
                 title: str = "", xlabel: str = "Time (Day)", ylabel: str = "",
                 normalize: bool = False, width: int = 800, height: int = 480) -> None:
    """Static SVG line chart, one polyline per series.

    ``normalize`` divides each series by its largest magnitude so curves of
    very different scale share one axis. Output depends only on the inputs.
    """
    if not series:
        raise EmptySeries("render_chart needs at least one series")
    arrays = {name: np.asarray(v, dtype=np.float64) for name, v in series.items()}
    lengths = {a.size for a in arrays.values()}
    if 0 in lengths:
        raise EmptySeries("render_chart got an empty series")
    if len(lengths) != 1:
        raise ValueError("all series must have the same length")
    n = lengths.pop()
    x = np.arange(n, dtype=np.float64) if times is None else np.asarray(times, dtype=np.float64)
    if x.size != n:
        raise ValueError("times and series lengths differ")
    if normalize:
        scaled = {}
        for name, a in arrays.items():
            peak = float(np.max(np.abs(a)))
            scaled[name] = a / peak if peak > 0 else a
        arrays = scaled

    stride = max(1, math.ceil(n / MAX_POINTS))
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)

    ymin = min(float(a.min()) for a in arrays.values())
    ymax = max(float(a.max()) for a in arrays.values())
    if ymax == ymin:
        pad = abs(ymax) * 0.05 or 1.0
        ymin, ymax = ymin - pad, ymax + pad
    xmin, xmax = float(x[0]), float(x[-1])
    if xmax == xmin:
        xmax = xmin + 1.0

    left, right, top, bottom = 80, 190, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def px(v):
        return left + (v - xmin) / (xmax - xmin) * pw

    def py(v):
        return top + (ymax - v) / (ymax - ymin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15">{html.escape(title)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for tv in _ticks(xmin, xmax):
        X = px(tv)
        out.append(f'<line x1="{_fmt(X)}" y1="{top + ph}" x2="{_fmt(X)}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(X)}" y="{top + ph + 18}" text-anchor="middle">{tv:.4g}</text>')
    for tv in _ticks(ymin, ymax):
        Y = py(tv)
        out.append(f'<line x1="{left - 5}" y1="{_fmt(Y)}" x2="{left}" y2="{_fmt(Y)}" stroke="black"/>')
        out.append(f'<line x1="{left}" y1="{_fmt(Y)}" x2="{left + pw}" y2="{_fmt(Y)}" stroke="#dddddd"/>')
        out.append(f'<text x="{left - 8}" y="{_fmt(Y + 4)}" text-anchor="end">{tv:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{html.escape(xlabel)}</text>')
    if ylabel or normalize:
        label = ylabel or "fraction of series maximum"
        out.append(f'<text transform="translate(18,{top + ph / 2:.1f}) rotate(-90)" '
                   f'text-anchor="middle">{html.escape(label)}</text>')

    for i, (name, a) in enumerate(arrays.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x[j]))},{_fmt(py(a[j]))}" for j in idx)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}">'
                   f'<title>{html.escape(name)}</title></polyline>')
        ly = top + 10 + 18 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{html.escape(_shorten(name))}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")


def _shorten(name: str, limit: int = 24) -> str:
    return name if len(name) <= limit else name[: limit - 1] + "…"
