"""Convergence-length summaries over independent groups."""
from __future__ import annotations

from ..metrics import ConvergenceSpec, group_convergence
from .runner import ResultTable


def detect_convergence(result, spec: ConvergenceSpec, metric: str = "diag_norm") -> list[dict]:
    """Per parameter point, convergence length mean and std over groups.

    Groups are the distinct seeds of otherwise identical series. ``result``
    is a :class:`ResultTable` or the row list read back from a CSV.
    """
    rows = result.rows if isinstance(result, ResultTable) else list(result)
    by_point: dict = {}
    for r in rows:
        if r["z_mm"] is None or r.get(metric) is None:
            continue
        key = (r["experiment"], r["topology"], r["n_modes"], r["dz_mm"],
               r["amplitude_per_mm"], r["support"], r["samples"], r["q"])
        by_point.setdefault(key, {}).setdefault(r["seed"], []).append((r["z_mm"], r[metric]))
    if not by_point:
        raise ValueError(f"no curves with metric {metric!r} found")

    out = []
    for key, groups in by_point.items():
        if len(groups) < spec.groups:
            raise ValueError(
                f"insufficient groups for {key[0]} dz={key[3]} A={key[4]} m={key[6]}: "
                f"found {len(groups)}, need {spec.groups}")
        seeds = sorted(groups)
        gc = group_convergence([sorted(groups[s]) for s in seeds], spec)
        out.append({
            "experiment": key[0], "topology": key[1], "n_modes": key[2], "dz_mm": key[3],
            "amplitude_per_mm": key[4], "support": key[5], "samples": key[6], "q": key[7],
            "metric": metric, "threshold": spec.threshold, "groups": len(seeds),
            "crossed": gc.crossed, "seeds": seeds,
            "lengths_mm": list(gc.lengths),
            "convergence_mean_mm": gc.mean, "convergence_std_mm": gc.std,
        })
    return out
