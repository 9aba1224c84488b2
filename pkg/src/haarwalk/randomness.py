"""Seeded detuning profiles and Haar-random unitaries.

Every random object is a pure function of ``(seed, sample_index)``: each sample
owns an independent PCG64 stream keyed on the pair, so samples can be drawn in
any order, on any worker, and come out bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SUPPORTS = ("zero_to_A", "symmetric_A")

# distinct spawn keys keep detuning and Haar streams from ever overlapping
_DETUNING_STREAM = 0
_HAAR_STREAM = 1

_U64 = 1 << 64


def parse_seed(value) -> int:
    """Accept an int, a decimal string, or a 0x-prefixed hex string."""
    if isinstance(value, bool):
        raise ValueError(f"invalid seed {value!r}")
    if isinstance(value, (int, np.integer)):
        seed = int(value)
    elif isinstance(value, str):
        s = value.strip().lower()
        try:
            seed = int(s, 16) if s.startswith("0x") else int(s, 10)
        except ValueError:
            raise ValueError(f"invalid seed {value!r}") from None
    else:
        raise ValueError(f"invalid seed {value!r}")
    if not 0 <= seed < _U64:
        raise ValueError(f"seed {value!r} is not a 64-bit unsigned integer")
    return seed


def sample_rng(seed: int, sample_index: int, stream: int = _DETUNING_STREAM) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=parse_seed(seed), spawn_key=(stream, int(sample_index)))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class NoisePlan:
    amplitude: float
    segment_length: float
    segments: int
    support: str = "zero_to_A"
    seed: int = 0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        if not self.segment_length > 0:
            raise ValueError("segment_length must be positive")
        if self.segments < 1:
            raise ValueError("need at least one segment")
        if self.support not in SUPPORTS:
            raise ValueError(f"support must be one of {SUPPORTS}")
        parse_seed(self.seed)

    @property
    def length(self) -> float:
        return self.segments * self.segment_length


@dataclass(frozen=True)
class DetuningProfile:
    values: np.ndarray  # (segments, n_modes), 1/mm
    plan: NoisePlan
    sample_index: int

    @property
    def n_modes(self) -> int:
        return self.values.shape[1]


def unit_draws(seed: int, sample_index: int, segments: int, n_modes: int) -> np.ndarray:
    """Uniform [0, 1) draws shared by every amplitude of one sample.

    Rows fill in segment order, so a shorter chip sees exactly the first rows
    of a longer one.
    """
    return sample_rng(seed, sample_index).random((segments, n_modes))


def sample_detuning_profile(plan: NoisePlan, n_modes: int, sample_index: int) -> DetuningProfile:
    if n_modes < 2:
        raise ValueError("n_modes must be at least 2")
    u = unit_draws(plan.seed, sample_index, plan.segments, n_modes)
    if plan.support == "zero_to_A":
        values = plan.amplitude * u
    else:
        values = plan.amplitude * (2.0 * u - 1.0)
    return DetuningProfile(values, plan, sample_index)


def haar_unitary(n: int, seed: int = 0, sample_index: int = 0) -> np.ndarray:
    """Haar-distributed n x n unitary.

    QR of a complex Ginibre matrix, with each column of Q rotated by the phase
    of the matching diagonal entry of R so that R has a positive diagonal.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = sample_rng(seed, sample_index, _HAAR_STREAM)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
