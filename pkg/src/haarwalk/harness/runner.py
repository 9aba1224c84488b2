"""Ensemble execution.

Work is split into one task per (parameter point, sample index). Tasks are
independent and may run on any number of worker processes; results are
consumed in task order and folded by a single reducer, so output is the same
for every pool size.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..evolution import EvolutionRequest, evolve_chip, unitarity_residual
from ..lattice import LatticeSpec
from ..metrics import ConvergenceSpec, convergence_length, ensemble_stats, offdiag_norm_from_states, sem_of_norm
from ..multiphoton import TwoPhotonDistribution, m2_norm_from_intensities, mode_intensities, pair_probabilities
from ..randomness import NoisePlan, haar_unitary, sample_detuning_profile
from .config import ExperimentConfig

log = logging.getLogger(__name__)

COLUMNS = (
    "experiment", "topology", "n_modes", "z_mm", "dz_mm", "amplitude_per_mm", "support",
    "samples", "q", "seed", "diag_norm", "sem", "offdiag_norm", "m2_norm", "convergence_mm",
)

_U64 = 1 << 64


def worker_count() -> int:
    """Pool size: HAARWALK_WORKERS if set and positive, else the logical CPU count."""
    env = os.environ.get("HAARWALK_WORKERS")
    default = os.cpu_count() or 1
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"HAARWALK_WORKERS={env!r} is not an integer") from None
        return n if n > 0 else default
    return default


@dataclass(frozen=True)
class Point:
    """One curve's worth of physics: everything except sample count and length."""

    label: str
    lattice: LatticeSpec
    dz: float | None
    amplitude: float | None
    support: str | None
    seed: int
    inputs: tuple[int, ...]
    ensemble: str = "qsw"


@dataclass(frozen=True)
class _Task:
    point: Point
    segment_counts: tuple[int, ...]
    sample_index: int


def _simulate(task: _Task):
    """Output columns U[:, inputs] at each recorded length, and the worst unitarity residual."""
    p = task.point
    if p.ensemble == "haar":
        u = haar_unitary(p.lattice.n_modes, p.seed, task.sample_index)
        return u[None, :, list(p.inputs)], unitarity_residual(u)
    plan = NoisePlan(p.amplitude, p.dz, max(max(task.segment_counts), 1), p.support, p.seed)
    profile = sample_detuning_profile(plan, p.lattice.n_modes, task.sample_index)
    snaps = evolve_chip(EvolutionRequest(p.lattice, profile, None, task.segment_counts))
    cols = np.stack([u[:, list(p.inputs)] for _, u in snaps])
    return cols, max(unitarity_residual(u) for _, u in snaps)


@dataclass
class ResultTable:
    rows: list
    config: ExperimentConfig
    max_unitarity_residual: float = 0.0

    def series(self, metric: str = "diag_norm") -> dict:
        """Curves keyed by everything except length, ``{key: [(z, value), ...]}``."""
        out: dict = {}
        for r in self.rows:
            if r["z_mm"] is None or r[metric] is None:
                continue
            key = series_key(r)
            out.setdefault(key, []).append((r["z_mm"], r[metric]))
        return out


def series_key(row: dict) -> tuple:
    return (row["experiment"], row["topology"], row["n_modes"], row["dz_mm"],
            row["amplitude_per_mm"], row["support"], row["samples"], row["q"], row["seed"])


def _points(cfg: ExperimentConfig) -> list[Point]:
    pts = []
    for g in range(cfg.groups):
        seed = (cfg.master_seed + g) % _U64
        for lat in cfg.lattices:
            inputs = cfg.inputs_for(lat)
            if cfg.ensemble == "haar":
                pts.append(Point("haar", lat, None, None, None, seed, inputs, "haar"))
                continue
            for dz in cfg.dz_mm:
                for a in cfg.amplitudes:
                    pts.append(Point("qsw", lat, dz, a, cfg.support, seed, inputs))
                    if cfg.amplitude_band:
                        b = cfg.amplitude_band
                        pts.append(Point("band_low", lat, dz, a * (1 - b), cfg.support, seed, inputs))
                        pts.append(Point("band_high", lat, dz, a * (1 + b), cfg.support, seed, inputs))
                if cfg.include_pure_walk:
                    pts.append(Point("qw", lat, dz, 0.0, cfg.support, seed, inputs))
    return pts


def _tasks(cfg: ExperimentConfig, points: list[Point]) -> Iterator[_Task]:
    m_max = max(cfg.samples)
    for p in points:
        counts = () if p.ensemble == "haar" else tuple(int(round(z / p.dz)) for z in cfg.lengths_mm)
        for s in range(m_max):
            yield _Task(p, counts, s)


def _row(cfg, p: Point, z, m, seed, **metrics) -> dict:
    row = {
        "experiment": f"{cfg.experiment}:{p.label}",
        "topology": p.lattice.topology,
        "n_modes": p.lattice.n_modes,
        "z_mm": z,
        "dz_mm": p.dz,
        "amplitude_per_mm": p.amplitude,
        "support": p.support,
        "samples": m,
        "q": cfg.q,
        "seed": seed,
        "diag_norm": None,
        "sem": None,
        "offdiag_norm": None,
        "m2_norm": None,
        "convergence_mm": None,
    }
    row.update(metrics)
    return row


def _reduce(cfg: ExperimentConfig, p: Point, cols: np.ndarray) -> list[dict]:
    """cols has shape (m_max, L, N, n_inputs)."""
    lengths = [None] if p.ensemble == "haar" else list(cfg.lengths_mm)
    first = cols[..., 0]
    probs = np.abs(first) ** 2
    intens = None
    if cfg.q == 2:
        n = cols.shape[2]
        intens = np.empty(probs.shape)
        for s in range(cols.shape[0]):
            for li in range(cols.shape[1]):
                pp = pair_probabilities(cols[s, li, :, 0], cols[s, li, :, 1])
                intens[s, li] = mode_intensities(TwoPhotonDistribution(n, pp, *p.inputs))

    rows = []
    for m in cfg.samples:
        series = []
        for li, z in enumerate(lengths):
            stats = ensemble_stats(probs[:m, li])
            metrics = {
                "diag_norm": stats.diag_norm,
                "sem": sem_of_norm(stats) if m > 1 else None,
                "offdiag_norm": offdiag_norm_from_states(first[:m, li]),
            }
            if intens is not None:
                metrics["m2_norm"] = m2_norm_from_intensities(intens[:m, li])
            series.append(_row(cfg, p, z, m, p.seed, **metrics))
        if cfg.convergence_threshold and p.ensemble != "haar":
            metric = "m2_norm" if cfg.q == 2 else "diag_norm"
            conv = convergence_length([(r["z_mm"], r[metric]) for r in series],
                                      ConvergenceSpec(cfg.convergence_threshold))
            for r in series:
                r["convergence_mm"] = conv
        rows.extend(series)
    return rows


def _results(tasks: list, workers: int):
    if workers <= 1 or len(tasks) < 2:
        yield from map(_simulate, tasks)
        return
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_simulate, tasks, chunksize=chunk)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> ResultTable:
    workers = worker_count() if workers is None else max(1, workers)
    points = _points(cfg)
    tasks = list(_tasks(cfg, points))
    m_max = max(cfg.samples)
    log.info("running %d tasks over %d parameter points on %d worker(s)", len(tasks), len(points), workers)

    rows, worst = [], 0.0
    buf = []
    pi = 0
    for cols, resid in _results(tasks, workers):
        worst = max(worst, resid)
        buf.append(cols)
        if len(buf) == m_max:
            rows.extend(_reduce(cfg, points[pi], np.stack(buf)))
            buf = []
            pi += 1
    return ResultTable(rows, cfg, worst)
