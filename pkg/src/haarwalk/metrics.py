"""Convergence diagnostics for unitary ensembles.

Everything here is a reduction over immutable inputs taken in index order, so
results are bit-stable no matter how the inputs were produced.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

CHOI_GUARD = 4096


@dataclass(frozen=True)
class EnsembleStats:
    m: int
    mean_probs: np.ndarray
    m_matrix: np.ndarray
    diag_norm: float
    per_mode_std: np.ndarray

    def grid(self, rows: int, cols: int) -> np.ndarray:
        """The deviation vector laid out on the lattice."""
        return self.m_matrix.reshape(rows, cols)


@dataclass(frozen=True)
class ChoiMatrix:
    n: int
    entries: np.ndarray  # (n^2, n^2), row index i*n + k, column index j*n + l

    def diagonal_part(self) -> np.ndarray:
        return np.diag(np.diag(self.entries))

    def offdiagonal_part(self) -> np.ndarray:
        return self.entries - self.diagonal_part()


@dataclass(frozen=True)
class ConvergenceSpec:
    threshold: float
    groups: int = 1
    samples_per_group: int | None = None

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.groups < 1:
            raise ValueError("groups must be at least 1")


def ensemble_stats(dists: Sequence[np.ndarray]) -> EnsembleStats:
    p = np.asarray(dists, dtype=float)
    if p.ndim != 2 or len(p) == 0:
        raise ValueError("need a nonempty list of equal-length distributions")
    m, n = p.shape
    mean = p.mean(axis=0)
    dev = mean - 1.0 / n
    std = p.std(axis=0, ddof=1) if m > 1 else np.zeros(n)
    return EnsembleStats(m, mean, dev, float(np.sqrt(np.sum(dev ** 2))), std)


def sem_of_norm(stats: EnsembleStats, strict: bool = False) -> float:
    """Standard error of ``diag_norm`` by first-order error propagation.

    Default: ``sqrt(sum_j (dev_j / norm * std_j / sqrt(m))^2)``, i.e. the
    per-mode standard errors pushed through the gradient of the norm.

    ``strict=True`` is the uncorrected recipe, taken literally: the sum of
    squared gradient-weighted standard deviations without the square root,
    then divided by sqrt(m). It is kept only for comparison.
    """
    if stats.m < 2:
        raise ValueError("sem needs at least 2 samples")
    if stats.diag_norm == 0:
        return 0.0
    grad = stats.m_matrix / stats.diag_norm
    if strict:
        return float(np.sum((grad * stats.per_mode_std) ** 2) / np.sqrt(stats.m))
    dp = stats.per_mode_std / np.sqrt(stats.m)
    return float(np.sqrt(np.sum((grad * dp) ** 2)))


def mean_output_state(states: np.ndarray) -> np.ndarray:
    """(1/m) sum_s psi_s psi_s^dagger for output states stacked as (m, N)."""
    psi = np.asarray(states)
    return np.einsum("sk,sl->kl", psi, psi.conj()) / len(psi)


def offdiag_norm_from_states(states: np.ndarray) -> float:
    a = mean_output_state(states)
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def offdiag_norm(unitaries: Sequence[np.ndarray], input_mode: int) -> float:
    """Frobenius norm of the off-diagonal part of E[U |i><i| U^dagger]."""
    us = np.asarray(unitaries)
    if len(us) == 0:
        raise ValueError("empty ensemble")
    return offdiag_norm_from_states(us[:, :, input_mode])


def _as_ensemble(unitaries) -> np.ndarray:
    us = np.asarray(unitaries)
    if us.ndim == 2:
        us = us[None]
    if len(us) == 0:
        raise ValueError("empty ensemble")
    return us


def choi_of_ensemble(unitaries: Sequence[np.ndarray]) -> ChoiMatrix:
    """chi_{ik,jl} = (1/m) sum_s U_ki conj(U_lj) / N."""
    us = _as_ensemble(unitaries)
    m, n, _ = us.shape
    if n * n > CHOI_GUARD:
        raise ValueError(f"Choi matrix of dimension {n * n} exceeds the limit of {CHOI_GUARD}")
    # v_s[i*n + k] = U_s[k, i]
    vecs = np.transpose(us, (0, 2, 1)).reshape(m, n * n)
    chi = np.einsum("sa,sb->ab", vecs, vecs.conj()) / (m * n)
    return ChoiMatrix(n, chi)


def haar_choi(n: int) -> ChoiMatrix:
    return ChoiMatrix(n, np.eye(n * n) / n ** 2)


def trace_norm(a: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def transition_matrix(unitaries) -> np.ndarray:
    """T[k, i] = (1/m) sum_s |U_s[k, i]|^2."""
    us = _as_ensemble(unitaries)
    return np.mean(np.abs(us) ** 2, axis=0)


def diag_trace_distance(unitaries, inputs: Iterable[int] | None = None) -> float:
    """D_d = (1/N) sum_{i,k} |T[k, i] - 1/N| over the chosen input columns."""
    t = transition_matrix(unitaries)
    n = t.shape[0]
    cols = list(range(n)) if inputs is None else list(inputs)
    return float(np.sum(np.abs(t[:, cols] - 1.0 / n)) / n)


def diag_trace_distance_from_transition(t: np.ndarray) -> float:
    n = t.shape[0]
    return float(np.sum(np.abs(t - 1.0 / n)) / n)


def offdiag_trace_norm(choi: ChoiMatrix) -> float:
    return trace_norm(choi.offdiagonal_part())


def diamond_bound_from_choi(choi: ChoiMatrix) -> float:
    d_d = float(np.sum(np.abs(np.diag(choi.entries).real - 1.0 / choi.n ** 2)))
    return choi.n * (d_d + offdiag_trace_norm(choi))


def diamond_bound(unitaries) -> float:
    """Upper bound N (D_d + D_od) on the diamond distance to the Haar channel."""
    return diamond_bound_from_choi(choi_of_ensemble(unitaries))


def choi_distance_to_haar(unitaries) -> float:
    """N ||chi_ensemble - I/N^2||_1, the quantity the bound sits above."""
    choi = choi_of_ensemble(unitaries)
    return choi.n * trace_norm(choi.entries - haar_choi(choi.n).entries)


def convergence_length(curve: Sequence[tuple[float, float]], spec: ConvergenceSpec | float):
    """First length at which the norm drops strictly below the threshold, or None."""
    threshold = spec.threshold if isinstance(spec, ConvergenceSpec) else float(spec)
    if len(curve) == 0:
        raise ValueError("empty curve")
    zs = [z for z, _ in curve]
    if zs != sorted(zs):
        raise ValueError("curve must be sorted by length")
    for z, v in curve:
        if v < threshold:
            return z
    return None


@dataclass(frozen=True)
class GroupConvergence:
    lengths: tuple  # per group, None where the curve never crossed
    mean: float | None
    std: float | None

    @property
    def crossed(self) -> int:
        return sum(x is not None for x in self.lengths)


def group_convergence(curves: Sequence[Sequence[tuple[float, float]]],
                      spec: ConvergenceSpec) -> GroupConvergence:
    """Mean and sample standard deviation of convergence lengths over groups.

    Groups that never cross are reported as None and left out of the moments.
    """
    if len(curves) < spec.groups:
        raise ValueError(f"insufficient groups: got {len(curves)}, need {spec.groups}")
    lengths = tuple(convergence_length(c, spec) for c in curves)
    hit = np.array([x for x in lengths if x is not None], dtype=float)
    if len(hit) == 0:
        return GroupConvergence(lengths, None, None)
    std = float(hit.std(ddof=1)) if len(hit) > 1 else 0.0
    return GroupConvergence(lengths, float(hit.mean()), std)
