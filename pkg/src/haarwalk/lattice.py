"""Coupled-waveguide lattices and directional-coupler calibration.

Couplings and propagation constants are in units of 1/mm, lengths in mm.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import least_squares

C_NN = 0.225
C_NNN = 0.09
BETA0 = 11660.0
DV_SLOPE = 0.02


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry and coupling constants of a waveguide array.

    Modes are indexed row-major: waveguide (r, c) is mode ``r * cols + c``.
    A chain is a single row (``rows == 1``).
    """

    topology: str = "grid"
    rows: int = 5
    cols: int = 5
    c_nn: float = C_NN
    c_nnn: float = C_NNN
    beta0: float = BETA0

    def __post_init__(self):
        if self.topology not in ("grid", "chain"):
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.topology == "chain" and self.rows != 1:
            raise ValueError("a chain has rows=1")
        if self.rows * self.cols < 2:
            raise ValueError("a lattice needs at least 2 modes")
        if not self.c_nn > 0:
            raise ValueError("c_nn must be positive")
        if self.c_nnn < 0 or self.beta0 < 0:
            raise ValueError("c_nnn and beta0 must be nonnegative")

    @property
    def n_modes(self) -> int:
        return self.rows * self.cols

    @property
    def center_mode(self) -> int:
        return (self.rows // 2) * self.cols + self.cols // 2

    def index(self, row: int, col: int) -> int:
        return row * self.cols + col

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "LatticeSpec":
        return cls(**d)

    @classmethod
    def chain(cls, n: int, **kw) -> "LatticeSpec":
        return cls(topology="chain", rows=1, cols=n, **kw)


@dataclass(frozen=True)
class CouplingMatrix:
    """Noiseless Hamiltonian of a lattice: ``beta0`` on the diagonal, couplings off it."""

    entries: np.ndarray
    beta0: float

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def couplings(self) -> np.ndarray:
        """Entries with the common ``beta0`` offset removed (exact: x - x == 0)."""
        h = self.entries.copy()
        np.fill_diagonal(h, np.diag(h) - self.beta0)
        return h


@dataclass(frozen=True)
class CouplerCalibration:
    c0: float = C_NN
    slope: float = DV_SLOPE

    def __post_init__(self):
        if not (self.c0 > 0 and self.slope > 0):
            raise ValueError("c0 and slope must be positive")


def build_coupling_matrix(spec: LatticeSpec) -> CouplingMatrix:
    """Real symmetric Hamiltonian of the undetuned lattice.

    On a grid, horizontal/vertical neighbours couple with ``c_nn`` and diagonal
    neighbours with ``c_nnn``; a chain is tridiagonal in ``c_nn``.
    """
    n = spec.n_modes
    h = np.zeros((n, n))
    if spec.topology == "chain":
        steps = [(0, 1, spec.c_nn)]
    else:
        steps = [(0, 1, spec.c_nn), (1, 0, spec.c_nn),
                 (1, 1, spec.c_nnn), (1, -1, spec.c_nnn)]
    for r in range(spec.rows):
        for c in range(spec.cols):
            i = spec.index(r, c)
            for dr, dc, v in steps:
                rr, cc = r + dr, c + dc
                if 0 <= rr < spec.rows and 0 <= cc < spec.cols and v != 0:
                    j = spec.index(rr, cc)
                    h[i, j] = h[j, i] = v
    np.fill_diagonal(h, spec.beta0)
    return CouplingMatrix(h, float(spec.beta0))


def coupler_imbalance(c, z):
    """(I_A - I_B) / (I_A + I_B) of a two-waveguide coupler of length ``z``."""
    return np.cos(2 * np.asarray(c) * np.asarray(z))


def coupler_intensities(c, z):
    return np.cos(c * z) ** 2, np.sin(c * z) ** 2


def effective_coupling(delta_beta, c0):
    """Beat coupling of a detuned coupler, sqrt((dβ/2)^2 + c0^2)."""
    if np.any(np.asarray(c0) <= 0):
        raise ValueError("c0 must be positive")
    return np.hypot(np.asarray(delta_beta) / 2, c0)


def delta_beta_from_coupling(c_eff, c0):
    """Inverse of :func:`effective_coupling` (nonnegative detuning magnitude)."""
    return 2 * np.sqrt(np.maximum(np.asarray(c_eff) ** 2 - c0 ** 2, 0.0))


def delta_beta_from_speed(delta_v, calib: CouplerCalibration | None = None):
    """Linear writing-speed calibration, dβ = slope * dV."""
    calib = calib or CouplerCalibration()
    if np.any(np.asarray(delta_v) < 0):
        raise ValueError("delta_v must be nonnegative")
    return calib.slope * np.asarray(delta_v)


class CouplingFit(NamedTuple):
    coupling: float
    residual: float


def fit_coupling(samples: Sequence[tuple[float, float]], c_max: float = 2.0,
                 n_grid: int = 4000) -> CouplingFit:
    """Least-squares fit of ``imbalance = cos(2 C z)`` over C.

    The objective is multimodal in C, so a dense grid search picks the basin
    and a Levenberg-Marquardt polish refines it. ``residual`` is the sum of
    squared residuals at the optimum.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or len(data) < 3:
        raise ValueError("need at least 3 (z, imbalance) samples")
    z, y = data[:, 0], data[:, 1]
    if np.ptp(z) == 0:
        raise ValueError("degenerate sample set: all lengths are equal")

    grid = np.linspace(c_max / n_grid, c_max, n_grid)
    sse = ((np.cos(2 * grid[:, None] * z[None, :]) - y) ** 2).sum(axis=1)
    c_start = grid[np.argmin(sse)]

    res = least_squares(lambda c: np.cos(2 * c[0] * z) - y, x0=[c_start],
                        method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    c = abs(float(res.x[0]))
    return CouplingFit(c, float(((np.cos(2 * c * z) - y) ** 2).sum()))
