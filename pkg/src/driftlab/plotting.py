"""Self-contained SVG charts: per-chunk metric lines, CD diagrams, radars.

Everything is plain SVG text with coordinates rounded to two decimals, so
identical inputs give identical bytes.
"""
from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .experiment import MANIFEST_FILE, RESULTS_FILE, read_results

log = logging.getLogger(__name__)

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _f(v) -> str:
    return f"{v:.2f}"


def _svg(width, height, body) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        + "\n".join(body) + "\n</svg>\n"
    )


def _text(x, y, s, anchor="start", **attrs):
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<text x="{_f(x)}" y="{_f(y)}" text-anchor="{anchor}"{extra}>{escape(str(s))}</text>'


def line_chart(series: dict, title="", drift_positions=(), chunk_offset=1,
               width=720, height=320) -> str:
    """One polyline per method over chunk index; drifts as dashed verticals.

    ``series`` maps method name to a 1-D array of scores in [0, 1];
    ``chunk_offset`` is the stream index of the first score.
    """
    left, right, top, bottom = 50, 140, 30, 40
    pw, ph = width - left - right, height - top - bottom
    n = max((len(v) for v in series.values()), default=0)
    lo, hi = chunk_offset, chunk_offset + max(n - 1, 1)

    def sx(t):
        return left + (t - lo) / (hi - lo) * pw

    def sy(v):
        return top + (1.0 - v) * ph

    body = [_text(width / 2, 18, title, "middle", font_size=13)]
    body.append(f'<rect class="plot-area" x="{left}" y="{top}" width="{pw}" height="{ph}" '
                f'fill="none" stroke="#444"/>')
    for v in (0.0, 0.25, 0.5, 0.75, 1.0):
        body.append(f'<line x1="{left - 4}" y1="{_f(sy(v))}" x2="{left}" y2="{_f(sy(v))}" stroke="#444"/>')
        body.append(_text(left - 6, sy(v) + 4, f"{v:.2f}", "end"))
    body.append(_text(left + pw / 2, height - 8, "chunk", "middle"))
    for t in np.unique(np.linspace(lo, hi, 6).round().astype(int)):
        body.append(f'<line x1="{_f(sx(t))}" y1="{top + ph}" x2="{_f(sx(t))}" y2="{top + ph + 4}" stroke="#444"/>')
        body.append(_text(sx(t), top + ph + 15, t, "middle"))
    for d in drift_positions:
        if lo <= d <= hi:
            body.append(f'<line class="drift" x1="{_f(sx(d))}" y1="{top}" x2="{_f(sx(d))}" '
                        f'y2="{top + ph}" stroke="#999" stroke-dasharray="4 3"/>')
    for i, (name, values) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_f(sx(chunk_offset + t))},{_f(sy(v))}" for t, v in enumerate(values))
        body.append(f'<polyline class="series" data-method="{escape(name)}" fill="none" '
                    f'stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 14 * i + 8
        body.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 26}" y2="{ly}" '
                    f'stroke="{color}" stroke-width="2"/>')
        body.append(_text(left + pw + 30, ly + 4, name))
    return _svg(width, height, body)


def cd_diagram(geometry: dict, title="", width=640) -> str:
    """Critical-difference diagram; better (higher) ranks on the right."""
    methods = geometry["methods"]
    k = geometry["axis"]["max"]
    left, right, top = 40, 40, 85
    pw = width - left - right
    half = math.ceil(len(methods) / 2)
    height = top + 30 + 16 * max(half, len(geometry["bars"])) + 40

    def sx(r):
        return left + (r - 1) / max(k - 1, 1) * pw

    body = [_text(width / 2, 18, title, "middle", font_size=13)]
    body.append(f'<line class="axis" x1="{left}" y1="{top}" x2="{left + pw}" y2="{top}" stroke="black"/>')
    for r in range(1, k + 1):
        body.append(f'<line x1="{_f(sx(r))}" y1="{top - 5}" x2="{_f(sx(r))}" y2="{top}" stroke="black"/>')
        body.append(_text(sx(r), top - 8, r, "middle"))
    cd = geometry["cd"]
    body.append(f'<line class="cd" x1="{_f(sx(1))}" y1="{top - 35}" x2="{_f(sx(1 + cd))}" '
                f'y2="{top - 35}" stroke="black" stroke-width="2"/>')
    body.append(_text(sx(1 + cd / 2), top - 40, f"CD = {cd:.3f}", "middle"))
    for i, m in enumerate(methods):
        x = sx(m["rank"])
        # worse half labelled on the left, better half on the right
        if i < half:
            y = top + 30 + 16 * i
            body.append(f'<polyline fill="none" stroke="#444" points="{_f(x)},{top} {_f(x)},{y} {left - 10},{y}"/>')
            body.append(_text(left - 12, y + 4, f'{m["name"]} ({m["rank"]:.2f})', "end"))
        else:
            y = top + 30 + 16 * (len(methods) - 1 - i)
            body.append(f'<polyline fill="none" stroke="#444" points="{_f(x)},{top} {_f(x)},{y} {left + pw + 10},{y}"/>')
            body.append(_text(left + pw + 12, y + 4, f'{m["name"]} ({m["rank"]:.2f})', "start"))
    for j, bar in enumerate(geometry["bars"]):
        y = top + 8 + 6 * j
        body.append(f'<line class="group-bar" x1="{_f(sx(bar["from"]) - 3)}" y1="{y}" '
                    f'x2="{_f(sx(bar["to"]) + 3)}" y2="{y}" stroke="black" stroke-width="4"/>')
    return _svg(width + 320, height, ['<g transform="translate(160,0)">'] + body + ["</g>"])


def radar_chart(values: dict, axes, title="", size=420) -> str:
    """Polygon per method over metric axes spaced ``360 / len(axes)`` degrees apart."""
    cx = cy = size / 2
    radius = size / 2 - 70
    n = len(axes)

    def point(i, v):
        angle = -math.pi / 2 + 2 * math.pi * i / n
        return cx + radius * v * math.cos(angle), cy + 20 + radius * v * math.sin(angle)

    body = [_text(cx, 18, title, "middle", font_size=13)]
    for level in (0.25, 0.5, 0.75, 1.0):
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in (point(i, level) for i in range(n)))
        body.append(f'<polygon class="grid" fill="none" stroke="#ccc" points="{pts}"/>')
    for i, name in enumerate(axes):
        x, y = point(i, 1.0)
        body.append(f'<line class="radar-axis" data-metric="{escape(name)}" x1="{_f(cx)}" '
                    f'y1="{_f(cy + 20)}" x2="{_f(x)}" y2="{_f(y)}" stroke="#888"/>')
        lx, ly = point(i, 1.15)
        body.append(_text(lx, ly + 4, name, "middle"))
    for j, (method, vals) in enumerate(values.items()):
        color = PALETTE[j % len(PALETTE)]
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in (point(i, v) for i, v in enumerate(vals)))
        body.append(f'<polygon class="series" data-method="{escape(method)}" fill="{color}" '
                    f'fill-opacity="0.12" stroke="{color}" points="{pts}"/>')
        body.append(_text(10, size + 10 + 14 * j, method, fill=color))
    return _svg(size, size + 20 + 14 * len(values), body)


def plot_results(results_dir) -> list[Path]:
    """Write every chart for a results directory into ``plots/``."""
    results_dir = Path(results_dir)
    results_path = results_dir / RESULTS_FILE
    if not results_path.exists():
        log.warning("no results in %s; nothing to plot", results_dir)
        return []
    rows = read_results(results_path)
    if not rows:
        log.warning("results in %s are empty; nothing to plot", results_dir)
        return []
    manifest = json.loads((results_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    drifts = {s["id"]: s.get("drift_positions", []) for s in manifest["streams"]}
    out = results_dir / "plots"
    out.mkdir(exist_ok=True)
    written = []

    data = {}
    for s, m, t, metric, v in rows:
        data.setdefault(s, {}).setdefault(metric, {}).setdefault(m, []).append((t, v))
    for stream, by_metric in sorted(data.items()):
        for metric, by_method in sorted(by_metric.items()):
            series = {}
            offset = 1
            for method, pts in sorted(by_method.items()):
                pts.sort()
                offset = pts[0][0]
                series[method] = np.array([v for _, v in pts])
            path = out / f"lines_{stream}_{metric}.svg"
            path.write_text(line_chart(series, f"{stream}: {metric}", drifts.get(stream, ()), offset),
                            encoding="utf-8")
            written.append(path)
        metrics = sorted(by_metric)
        methods = sorted({m for d in by_metric.values() for m in d})
        radar = {m: [float(np.mean([v for _, v in by_metric[x].get(m, [(0, 0.0)])])) for x in metrics]
                 for m in methods}
        if len(metrics) >= 3:
            path = out / f"radar_{stream}.svg"
            path.write_text(radar_chart(radar, metrics, stream), encoding="utf-8")
            written.append(path)

    for geo_path in sorted((results_dir / "analysis").glob("cd_*.json")):
        geometry = json.loads(geo_path.read_text(encoding="utf-8"))
        path = out / f"{geo_path.stem}.svg"
        path.write_text(cd_diagram(geometry, f"Nemenyi CD: {geometry.get('metric', '')}"),
                        encoding="utf-8")
        written.append(path)
    return written
