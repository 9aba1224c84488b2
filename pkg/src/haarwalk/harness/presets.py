"""Named experiments. Each expands to a complete config document.

Parameter sources:

fig3b            5x5 grid, dβ amplitude 0.4/mm, dz 2 mm, 17 random settings,
                 z = 1..8 cm, 15 % amplitude band, pure-walk reference.
fig4b_1d         1x25 chain, amplitudes 0.1..0.8/mm, 6 settings, z = 8 cm.
figS1_offdiag    grid, amplitudes 0.2..0.6/mm, 10..500 samples, z = 10 cm.
figS11           fig3b settings carried to 30 cm.
figS12_long      grid, amplitudes 0.2..0.6/mm, 100 and 500 samples, dz 2 mm, z up to 50 cm.
figS13_segments  grid, amplitudes 0.2 and 0.4/mm, dz 1..20 mm, 10 groups of 100 samples.
figS16_twophoton figS12_long with two photons injected.
haar_oracle      Haar-sampled ensembles of 10..500 unitaries through the same metrics.
"""
from __future__ import annotations

import copy

from ..lattice import C_NN, C_NNN, BETA0

GRID_5X5 = {"topology": "grid", "rows": 5, "cols": 5, "c_nn": C_NN, "c_nnn": C_NNN, "beta0": BETA0}
CHAIN_25 = {"topology": "chain", "rows": 1, "cols": 25, "c_nn": C_NN, "c_nnn": 0.0, "beta0": BETA0}

AMPLITUDES_S12 = [0.2, 0.3, 0.4, 0.5, 0.6]


def _mm(start, stop, step):
    return [float(z) for z in range(start, stop + 1, step)]


def _base(name, **run):
    doc = {
        "experiment": name,
        "lattice": copy.deepcopy(GRID_5X5),
        "noise": {"amplitude": 0.4, "dz_mm": 2.0, "support": "zero_to_A"},
        "run": {"ensemble": "qsw", "lengths_mm": _mm(10, 80, 10), "samples": 17,
                "master_seed": 0, "groups": 1, "q": 1, "include_pure_walk": False},
        "amplitude_band": None,
        "convergence_threshold": None,
    }
    doc["run"].update(run)
    return doc


def _fig3b():
    doc = _base("fig3b", include_pure_walk=True)
    doc["amplitude_band"] = 0.15
    return doc


def _fig4b_1d():
    doc = _base("fig4b_1d", lengths_mm=[80.0], samples=6)
    doc["lattice"] = copy.deepcopy(CHAIN_25)
    doc["noise"]["amplitude"] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]
    return doc


def _figS1():
    doc = _base("figS1_offdiag", lengths_mm=[100.0], samples=[10, 20, 50, 100, 200, 500])
    doc["noise"]["amplitude"] = list(AMPLITUDES_S12)
    return doc


def _figS11():
    doc = _base("figS11", lengths_mm=_mm(10, 300, 10), include_pure_walk=True)
    doc["amplitude_band"] = 0.15
    return doc


def _figS12():
    doc = _base("figS12_long", lengths_mm=_mm(10, 500, 10), samples=[100, 500])
    doc["noise"]["amplitude"] = list(AMPLITUDES_S12)
    return doc


def _figS13():
    doc = _base("figS13_segments", lengths_mm=_mm(20, 400, 20), samples=100, groups=10)
    doc["noise"]["amplitude"] = [0.2, 0.4]
    doc["noise"]["dz_mm"] = [1.0, 2.0, 5.0, 10.0, 20.0]
    return doc


def _figS16():
    doc = _figS12()
    doc["experiment"] = "figS16_twophoton"
    doc["run"]["q"] = 2
    return doc


def _haar():
    doc = _base("haar_oracle", ensemble="haar", lengths_mm=[], samples=[10, 17, 100, 500])
    doc["noise"]["amplitude"] = 0.0
    return doc


PRESETS = {
    "fig3b": _fig3b,
    "fig4b_1d": _fig4b_1d,
    "figS1_offdiag": _figS1,
    "figS11": _figS11,
    "figS12_long": _figS12,
    "figS13_segments": _figS13,
    "figS16_twophoton": _figS16,
    "haar_oracle": _haar,
}


def preset_document(preset_id: str) -> dict:
    if preset_id not in PRESETS:
        raise KeyError(f"unknown preset {preset_id!r}; valid ids: {', '.join(PRESETS)}")
    return PRESETS[preset_id]()
