"""Static SVG line charts of sweep results (no plotting library needed).

Output is byte-deterministic for identical input reports.
"""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import InvalidParameterError

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 55
COLORS = ("#1f77b4", "#d62728")


def _nice_ceil(v):
    if v <= 0:
        return 1.0
    mag = 10.0 ** math.floor(math.log10(v))
    for m in (1.0, 2.0, 2.5, 5.0, 10.0):
        if v <= m * mag + 1e-12:
            return m * mag
    return 10.0 * mag


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / n for i in range(n + 1)]


def _fmt(v):
    return f"{v:.2f}"


def _label(v):
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return s if s not in ("", "-0") else "0"


def line_chart(title, xlabel, ylabel, xs, series, ymax):
    """Render ``series`` (list of (name, ys)) against shared ``xs`` as an SVG document string.

    NaN values break the polyline into separate segments.
    """
    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM
    x0, x1 = min(xs), max(xs)
    span = (x1 - x0) or 1.0

    def px(x):
        return LEFT + (x - x0) / span * pw

    def py(y):
        return TOP + ph - (y / ymax) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for t in _ticks(0.0, ymax):
        y = py(t)
        out.append(f'<line x1="{LEFT}" y1="{_fmt(y)}" x2="{LEFT + pw}" y2="{_fmt(y)}" stroke="#dddddd"/>')
        out.append(f'<text x="{LEFT - 6}" y="{_fmt(y + 4)}" text-anchor="end">{_label(t)}</text>')
    for t in _ticks(x0, x1) if x1 > x0 else [x0]:
        x = px(t)
        out.append(f'<line x1="{_fmt(x)}" y1="{TOP + ph}" x2="{_fmt(x)}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{TOP + ph + 18}" text-anchor="middle">{_label(t)}</text>')
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(
        f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="18" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for i, (name, ys) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        segment = []
        segments = [segment]
        for x, y in zip(xs, ys):
            if math.isnan(y):
                segment = []
                segments.append(segment)
            else:
                segment.append(f"{_fmt(px(x))},{_fmt(py(min(y, ymax)))}")
        for seg in segments:
            if seg:
                out.append(
                    f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{" ".join(seg)}"/>'
                )
        ly = TOP + 20 + 20 * i
        lx = LEFT + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plots(reports, out_dir) -> list[Path]:
    """Write ``rates_c<N>.svg`` and ``farfrr_c<N>.svg`` for each center count N.

    Only center counts with at least two distinct spread values are plotted;
    if none qualifies an InvalidParameterError explains why.
    """
    by_centers = defaultdict(dict)
    for r in reports:
        by_centers[r.num_centers][r.spread] = r
    eligible = {c: rows for c, rows in by_centers.items() if len(rows) >= 2}
    if not eligible:
        raise InvalidParameterError(
            "plots need at least two spread values for some center count; "
            f"got spreads per center count: { {c: len(v) for c, v in sorted(by_centers.items())} }"
        )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for c in sorted(eligible):
        rows = eligible[c]
        xs = sorted(rows)
        face = [100.0 * rows[s].face_rate for s in xs]
        nonface = [100.0 * rows[s].nonface_rate for s in xs]
        far = [100.0 * rows[s].far for s in xs]
        frr = [100.0 * rows[s].frr for s in xs]
        rates = line_chart(
            f"Spread effect on face / non-face detection (centers = {c})",
            "spread", "detection rate (%)", xs,
            [("face", face), ("non-face", nonface)], 100.0,
        )
        finite = [v for v in far + frr if not math.isnan(v)]
        farfrr = line_chart(
            f"FAR and FRR vs spread (centers = {c})",
            "spread", "error rate (%)", xs,
            [("FAR", far), ("FRR", frr)], _nice_ceil(max(finite, default=1.0)),
        )
        for name, doc in ((f"rates_c{c}.svg", rates), (f"farfrr_c{c}.svg", farfrr)):
            path = out_dir / name
            try:
                path.write_text(doc, encoding="utf-8")
            except OSError as exc:
                raise OSError(f"cannot write plot {path}: {exc.strerror or exc}") from exc
            written.append(path)
    return written
