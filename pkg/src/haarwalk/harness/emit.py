"""CSV, JSON and SVG artifacts."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .. import __version__
from .config import ConfigError
from .runner import COLUMNS, ResultTable


class HarnessIOError(OSError):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path, text: str):
    p = Path(path)
    try:
        if p.parent and not p.parent.exists():
            p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise HarnessIOError(f"cannot write {p}: {exc.strerror or exc}") from exc


def csv_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in COLUMNS])
    return buf.getvalue()


def emit_csv(table: ResultTable | list, path) -> None:
    rows = table.rows if isinstance(table, ResultTable) else table
    _write(path, csv_text(rows))


def _parse_cell(col: str, text: str):
    if text == "":
        return None
    if col in ("n_modes", "samples", "q", "seed"):
        return int(text)
    if col in ("experiment", "topology", "support"):
        return text
    return float(text)


def read_csv(path) -> list[dict]:
    try:
        with open(Path(path), newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != COLUMNS:
                raise ConfigError(f"{path}: unexpected header {reader.fieldnames}")
            return [{c: _parse_cell(c, r[c]) for c in COLUMNS} for r in reader]
    except OSError as exc:
        raise HarnessIOError(f"cannot read {path}: {exc.strerror or exc}") from exc


def summary(table: ResultTable) -> dict:
    """Sidecar content: resolved config, tool version and run-wide checks.

    Contains nothing that depends on the machine or the worker count.
    """
    cfg = table.config
    return {
        "tool": "haarwalk",
        "version": __version__,
        "config": cfg.to_dict(),
        "resolved_inputs": {f"{lat.topology}_{lat.rows}x{lat.cols}": list(cfg.inputs_for(lat))
                            for lat in cfg.lattices},
        "rows": len(table.rows),
        "max_unitarity_residual": table.max_unitarity_residual,
    }


def emit_json(doc: dict, path) -> None:
    _write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def svg_text(curves: dict, title: str = "", width: int = 720, height: int = 440) -> str:
    """Log-y line plot of norm against z. ``curves`` maps a label to [(z, value), ...]."""
    left, right, top, bottom = 70, 200, 40, 50
    pw, ph = width - left - right, height - top - bottom
    pts = [(z, v) for c in curves.values() for z, v in c if v is not None and v > 0]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{left}" y="{top - 15}" font-size="14">{escape(title)}</text>')
    if not pts:
        out.append(f'<text x="{left + 10}" y="{top + 20}" font-size="12">no data</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    zmin, zmax = min(z for z, _ in pts), max(z for z, _ in pts)
    if zmax == zmin:
        zmin, zmax = zmin - 1, zmax + 1
    lo = math.floor(math.log10(min(v for _, v in pts)))
    hi = math.ceil(math.log10(max(v for _, v in pts)))
    if hi == lo:
        hi += 1

    def sx(z):
        return left + (z - zmin) / (zmax - zmin) * pw

    def sy(v):
        return top + (hi - math.log10(v)) / (hi - lo) * ph

    for d in range(lo, hi + 1):
        y = sy(10.0 ** d)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 45}" y="{y + 4:.2f}" font-size="11">1e{d}</text>')
    for k in range(6):
        z = zmin + k * (zmax - zmin) / 5
        x = sx(z)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x - 10:.2f}" y="{top + ph + 20}" font-size="11">{z:g}</text>')
    out.append(f'<text x="{left + pw / 2 - 20:.2f}" y="{height - 10}" font-size="12">z (mm)</text>')

    for idx, (label, curve) in enumerate(curves.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        good = [(z, v) for z, v in curve if v is not None and v > 0]
        for (z0, v0), (z1, v1) in zip(good, good[1:]):
            out.append(f'<line x1="{sx(z0):.2f}" y1="{sy(v0):.2f}" x2="{sx(z1):.2f}" y2="{sy(v1):.2f}" '
                       f'stroke="{color}" stroke-width="1.5"/>')
        ly = top + 14 * idx + 10
        lx = left + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 25}" y="{ly + 4}" font-size="10">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def curves_for_plot(table: ResultTable) -> dict:
    metric = "m2_norm" if table.config.q == 2 else "diag_norm"
    curves = {}
    for key, curve in table.series(metric).items():
        exp, topo, n, dz, amp, _, m, _, seed = key
        label = f"{exp.split(':')[-1]} {topo} A={amp:g} dz={dz:g} m={m}"
        if table.config.groups > 1:
            label += f" s={seed}"
        curves[label] = curve
    return curves


def emit_svg(curves: dict | ResultTable, path, title: str = "") -> None:
    if isinstance(curves, ResultTable):
        title = title or curves.config.experiment
        curves = curves_for_plot(curves)
    _write(path, svg_text(curves, title))
