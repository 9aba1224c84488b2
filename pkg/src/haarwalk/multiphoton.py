"""Two indistinguishable photons through a unitary, and Haar targets for q photons."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from math import comb
from pathlib import Path
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class TwoPhotonDistribution:
    """Output statistics for photons injected in modes ``i != i_prime``.

    ``probs`` is symmetric; ``probs[j, j']`` is the probability of one photon
    in each of j and j' (or both in j when j == j'), so the unordered pairs
    j <= j' sum to one.
    """

    n: int
    probs: np.ndarray
    i: int
    i_prime: int

    def upper(self) -> np.ndarray:
        return np.triu(self.probs)

    def total(self) -> float:
        return float(self.upper().sum())

    def pairs(self):
        for j in range(self.n):
            for jp in range(j, self.n):
                yield j, jp, float(self.probs[j, jp])


def _check_inputs(n: int, i: int, i_prime: int):
    if i == i_prime:
        raise ValueError("two-photon statistics are defined only for distinct input modes")
    for x in (i, i_prime):
        if not 0 <= x < n:
            raise ValueError(f"input mode {x} out of range")


def pair_probabilities(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Symmetric p[j, j'] from the two input columns a = U[:, i], b = U[:, i']."""
    amp = np.outer(a, b) + np.outer(b, a)
    p = np.abs(amp) ** 2
    p[np.diag_indices_from(p)] /= 2
    # mirror the upper triangle so the store is exactly symmetric
    return np.triu(p) + np.triu(p, 1).T


def two_photon_distribution(u: np.ndarray, i: int, i_prime: int) -> TwoPhotonDistribution:
    u = np.asarray(u)
    n = u.shape[0]
    _check_inputs(n, i, i_prime)
    return TwoPhotonDistribution(n, pair_probabilities(u[:, i], u[:, i_prime]), i, i_prime)


def mode_intensities(d: TwoPhotonDistribution) -> np.ndarray:
    """I_j = 2 p_jj + sum_{j' != j} p_jj'."""
    p = d.probs
    return p.sum(axis=1) + np.diag(p)


def haar_two_photon_probability(n: int) -> float:
    if n < 2:
        raise ValueError("need at least 2 modes")
    return 2.0 / (n * (n + 1))


def haar_q_probability(n: int, q: int) -> float:
    """1 / C(N+q-1, q): Haar-average probability of any q-photon output pattern."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if n < 1:
        raise ValueError("n must be positive")
    return 1.0 / comb(n + q - 1, q)


def haar_mean_intensity(n: int, q: int) -> float:
    return q / n


def _ensemble(unitaries) -> np.ndarray:
    us = np.asarray(unitaries)
    if us.ndim == 2:
        us = us[None]
    if len(us) == 0:
        raise ValueError("empty ensemble")
    return us


def ensemble_intensities(unitaries, i: int, i_prime: int) -> np.ndarray:
    us = _ensemble(unitaries)
    _check_inputs(us.shape[1], i, i_prime)
    return np.array([mode_intensities(two_photon_distribution(u, i, i_prime)) for u in us])


def m2_norm_from_intensities(intensities: np.ndarray) -> float:
    it = np.asarray(intensities)
    dev = it.mean(axis=0) - 2.0 / it.shape[1]
    return float(np.sqrt(np.sum(dev ** 2)))


def m2_norm(unitaries, i: int, i_prime: int) -> float:
    """L2 distance of the ensemble-mean two-photon intensities from 2/N."""
    return m2_norm_from_intensities(ensemble_intensities(unitaries, i, i_prime))


def p_norm_two_photon(unitaries, i: int, i_prime: int) -> float:
    """L2 distance of the mean pair distribution from 2/(N(N+1)) over pairs j <= j'."""
    us = _ensemble(unitaries)
    n = us.shape[1]
    _check_inputs(n, i, i_prime)
    mean = np.mean([pair_probabilities(u[:, i], u[:, i_prime]) for u in us], axis=0)
    iu = np.triu_indices(n)
    return float(np.sqrt(np.sum((mean[iu] - haar_two_photon_probability(n)) ** 2)))


FORMAL_NORM_MAX_SAMPLES = 100


def formal_two_photon_norm(unitaries, i: int, i_prime: int) -> float:
    """Squared Hilbert-Schmidt distance between the mean two-photon state and its Haar average.

    Computed from overlaps of W = U_t^dagger U_s over all ordered sample
    pairs, which is O(m^2); refused above 100 samples.
    """
    us = _ensemble(unitaries)
    m, n, _ = us.shape
    _check_inputs(n, i, i_prime)
    if m > FORMAL_NORM_MAX_SAMPLES:
        raise ValueError(f"formal norm is limited to {FORMAL_NORM_MAX_SAMPLES} samples (got {m})")
    w = np.einsum("tki,skj->stij", us.conj(), us)
    overlap = np.abs(w[..., i, i] * w[..., i_prime, i_prime] + w[..., i, i_prime] * w[..., i_prime, i]) ** 2
    return float(overlap.sum() / m ** 2 - haar_two_photon_probability(n))


def write_two_photon_csv(d: TwoPhotonDistribution, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "j_prime", "p"])
        for j, jp, p in d.pairs():
            w.writerow([j, jp, repr(p)])


def write_intensity_csv(intensities: Sequence[float], path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "I"])
        for j, v in enumerate(intensities):
            w.writerow([j, repr(float(v))])
