import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from haarwalk.lattice import (CouplerCalibration, LatticeSpec, build_coupling_matrix, coupler_imbalance,
                              coupler_intensities, delta_beta_from_coupling, delta_beta_from_speed,
                              effective_coupling, fit_coupling)


def test_grid_entries():
    spec = LatticeSpec("grid", 5, 5, c_nn=0.225, c_nnn=0.09)
    h = build_coupling_matrix(spec).entries
    assert h[spec.index(0, 0), spec.index(0, 1)] == 0.225
    assert h[spec.index(0, 0), spec.index(1, 0)] == 0.225
    assert h[spec.index(0, 0), spec.index(1, 1)] == 0.09
    assert h[spec.index(0, 0), spec.index(0, 2)] == 0
    assert h[spec.index(0, 0), spec.index(2, 0)] == 0
    assert np.all(np.diag(h) == 11660.0)


def test_chain_is_tridiagonal():
    h = build_coupling_matrix(LatticeSpec.chain(3, c_nn=0.225)).entries
    assert h[0, 1] == h[1, 2] == 0.225
    assert h[0, 2] == 0
    assert np.all(np.triu(h, 2) == 0)


def test_rejects_single_mode():
    with pytest.raises(ValueError):
        LatticeSpec("grid", 1, 1)
    with pytest.raises(ValueError):
        LatticeSpec("chain", 2, 3)
    with pytest.raises(ValueError):
        LatticeSpec("grid", 2, 2, c_nn=0.0)


def _adjacency(spec):
    pairs = {}
    for i in range(spec.n_modes):
        for j in range(spec.n_modes):
            if i == j:
                continue
            (r1, c1), (r2, c2) = divmod(i, spec.cols), divmod(j, spec.cols)
            d = (abs(r1 - r2), abs(c1 - c2))
            if d in ((0, 1), (1, 0)):
                pairs[i, j] = spec.c_nn
            elif d == (1, 1) and spec.topology == "grid":
                pairs[i, j] = spec.c_nnn
    return pairs


@given(rows=st.integers(1, 6), cols=st.integers(2, 6), topology=st.sampled_from(["grid", "chain"]),
       beta0=st.sampled_from([0.0, 11660.0]))
def test_support_is_exactly_the_declared_adjacency(rows, cols, topology, beta0):
    if topology == "chain":
        rows = 1
    spec = LatticeSpec(topology, rows, cols, beta0=beta0)
    h = build_coupling_matrix(spec).entries
    assert np.array_equal(h, h.T)
    assert np.all(np.diag(h) == beta0)
    expected = np.zeros_like(h)
    for (i, j), v in _adjacency(spec).items():
        expected[i, j] = v
    off = h - np.diag(np.diag(h))
    assert np.array_equal(off, expected)


def test_couplings_drop_beta0_exactly():
    cm = build_coupling_matrix(LatticeSpec())
    ref = build_coupling_matrix(LatticeSpec(beta0=0.0)).entries
    assert np.array_equal(cm.couplings(), ref)


def test_coupler_imbalance_examples():
    c = 0.225
    assert coupler_imbalance(c, 0.0) == 1.0
    assert abs(coupler_imbalance(c, np.pi / (4 * c))) < 1e-15
    assert coupler_imbalance(c, np.pi / (2 * c)) == pytest.approx(-1.0, abs=1e-15)


@given(c=st.floats(0, 2), z=st.floats(0, 200))
def test_coupler_pythagorean_identity(c, z):
    lhs = coupler_imbalance(c, z) ** 2 + (2 * np.cos(c * z) * np.sin(c * z)) ** 2
    assert abs(lhs - 1) < 1e-12
    ia, ib = coupler_intensities(c, z)
    assert abs(ia - ib - coupler_imbalance(c, z)) < 1e-12


def test_effective_coupling_examples():
    assert effective_coupling(0.0, 0.225) == 0.225
    # sqrt(0.2^2 + 0.225^2) = sqrt(0.090625)
    assert effective_coupling(0.4, 0.225) == pytest.approx(0.30103986446980, abs=1e-12)
    with pytest.raises(ValueError):
        effective_coupling(0.1, 0.0)


@given(db=st.floats(0, 2), c0=st.floats(0.01, 1))
def test_effective_coupling_inverse_and_bound(db, c0):
    ce = effective_coupling(db, c0)
    assert ce >= c0
    if db == 0:
        assert ce == c0
    elif db > 1e-6:
        assert ce > c0
    assert delta_beta_from_coupling(ce, c0) == pytest.approx(db, abs=1e-7)


def test_delta_beta_from_speed():
    cal = CouplerCalibration(slope=0.02)
    assert delta_beta_from_speed(20, cal) == pytest.approx(0.4)
    assert delta_beta_from_speed(0, cal) == 0
    assert delta_beta_from_speed(50, cal) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        delta_beta_from_speed(-1, cal)
    with pytest.raises(ValueError):
        CouplerCalibration(c0=0.2, slope=0.0)


Z12 = np.linspace(0.5, 12.0, 12)


def test_fit_coupling_noiseless():
    fit = fit_coupling(list(zip(Z12, coupler_imbalance(0.225, Z12))))
    assert abs(fit.coupling - 0.225) < 1e-6
    assert fit.residual < 1e-20


@settings(max_examples=40, deadline=None)
@given(c=st.floats(0.05, 1.0))
def test_fit_coupling_exact_on_synthetic_data(c):
    fit = fit_coupling(list(zip(Z12, coupler_imbalance(c, Z12))))
    assert abs(fit.coupling - c) < 1e-9


def test_fit_coupling_with_noise():
    rng = np.random.default_rng(7)
    errs = []
    for _ in range(50):
        y = coupler_imbalance(0.225, Z12) + rng.normal(0, 0.01, Z12.size)
        errs.append(abs(fit_coupling(list(zip(Z12, y))).coupling - 0.225))
    assert max(errs) < 0.005


def test_fit_coupling_rejects_degenerate_input():
    with pytest.raises(ValueError):
        fit_coupling([(3.0, 0.1)] * 5)
    with pytest.raises(ValueError):
        fit_coupling([(1.0, 0.1), (2.0, 0.2)])
