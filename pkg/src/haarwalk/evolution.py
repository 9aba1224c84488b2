"""Piecewise-constant Hamiltonians and the chip unitary U(z).

A chip of K segments implements ``U(z) = U_{K-1} ... U_1 U_0`` with
``U_k = exp(-i H_k dz)`` and ``H_k = H_0 + diag(detuning[k])``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lattice import CouplingMatrix, LatticeSpec, build_coupling_matrix
from .randomness import DetuningProfile


@dataclass(frozen=True)
class EvolutionRequest:
    lattice: LatticeSpec
    profile: DetuningProfile
    input_mode: int | None = None
    record_lengths: Sequence[int] = field(default_factory=tuple)  # in segments

    def __post_init__(self):
        n = self.lattice.n_modes
        if self.profile.n_modes != n:
            raise ValueError(f"profile has {self.profile.n_modes} modes, lattice has {n}")
        if self.input_mode is not None and not 0 <= self.input_mode < n:
            raise ValueError(f"input_mode {self.input_mode} outside 0..{n - 1}")
        k = self.profile.plan.segments
        rec = list(self.record_lengths)
        if any(r < 0 or r > k for r in rec):
            raise ValueError(f"recorded lengths must lie in 0..{k} segments")
        if rec != sorted(rec):
            raise ValueError("record_lengths must be sorted")


def segment_hamiltonian(h0: CouplingMatrix, profile: DetuningProfile, k: int) -> np.ndarray:
    if h0.n != profile.n_modes:
        raise ValueError(f"dimension mismatch: h0 is {h0.n}, profile is {profile.n_modes}")
    if not 0 <= k < profile.values.shape[0]:
        raise IndexError(f"segment {k} out of range")
    h = h0.entries.copy()
    h[np.diag_indices_from(h)] += profile.values[k]
    return h


def unitary_of_segment(h: np.ndarray, dz: float, offset: float = 0.0) -> np.ndarray:
    """exp(-i h dz) from the eigendecomposition of ``h``.

    ``offset`` (normally beta0) is removed from the diagonal before
    diagonalising and returned as the scalar phase exp(-i offset dz), so the
    large propagation constant never enters the eigenvalues.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("h must be square")
    if np.abs(h - h.conj().T).max(initial=0.0) > 1e-12:
        raise ValueError("h is not Hermitian")
    if not dz > 0:
        raise ValueError("dz must be positive")
    hs = h.copy()
    if offset:
        hs[np.diag_indices_from(hs)] -= offset
    w, v = np.linalg.eigh(hs)
    u = (v * np.exp(-1j * w * dz)) @ v.conj().T
    if offset:
        u *= np.exp(-1j * offset * dz)
    return u


def segment_unitaries(couplings: np.ndarray, detunings: np.ndarray, dz: float) -> np.ndarray:
    """All K segment propagators at once, without the beta0 phase.

    ``couplings`` is the offset-free real symmetric H_0, ``detunings`` has
    shape (K, N). Returns a (K, N, N) complex array.
    """
    k, n = detunings.shape
    hs = np.broadcast_to(couplings, (k, n, n)).copy()
    hs[:, np.arange(n), np.arange(n)] += detunings
    w, v = np.linalg.eigh(hs)
    return (v * np.exp(-1j * w * dz)[:, None, :]) @ np.swapaxes(v, 1, 2)


def evolve_chip(req: EvolutionRequest) -> list[tuple[float, np.ndarray]]:
    """Prefix products U(k dz) at every recorded segment count.

    Snapshots come from one running product, each later segment multiplied on
    the left, so a single call costs K exponentials however many lengths are
    recorded.
    """
    h0 = build_coupling_matrix(req.lattice)
    plan = req.profile.plan
    dz = plan.segment_length
    rec = list(req.record_lengths)
    n = h0.n

    out = []
    u = np.eye(n, dtype=complex)
    ri = 0
    while ri < len(rec) and rec[ri] == 0:
        out.append((0.0, u.copy()))
        ri += 1
    if ri == len(rec):
        return out

    k_max = rec[-1]
    segs = segment_unitaries(h0.couplings(), req.profile.values[:k_max], dz)
    for k in range(k_max):
        u = segs[k] @ u
        while ri < len(rec) and rec[ri] == k + 1:
            z = (k + 1) * dz
            out.append((z, u * np.exp(-1j * h0.beta0 * z)))
            ri += 1
    return out


def constant_propagator(h: np.ndarray, z: float) -> np.ndarray:
    """exp(-i h z) for a time-independent Hamiltonian, from one eigendecomposition."""
    offset = float(np.real(np.mean(np.diag(h))))
    return unitary_of_segment(h, z, offset=offset)


def output_distribution(u: np.ndarray, input_mode: int) -> np.ndarray:
    """|U_{l,i}|^2 over output modes l: the diagonal of U |i><i| U^dagger."""
    if not 0 <= input_mode < u.shape[1]:
        raise ValueError(f"input_mode {input_mode} out of range")
    return np.abs(u[:, input_mode]) ** 2


def unitarity_residual(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def unitary_to_json(u: np.ndarray) -> str:
    """Debug dump: nested rows of [re, im] pairs."""
    return json.dumps([[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(u)])


def unitary_from_json(text: str) -> np.ndarray:
    a = np.asarray(json.loads(text), dtype=float)
    return a[..., 0] + 1j * a[..., 1]
