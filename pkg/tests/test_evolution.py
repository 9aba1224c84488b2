import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from haarwalk.evolution import (EvolutionRequest, constant_propagator, evolve_chip, output_distribution,
                                segment_hamiltonian, unitarity_residual, unitary_from_json,
                                unitary_of_segment, unitary_to_json)
from haarwalk.lattice import LatticeSpec, build_coupling_matrix
from haarwalk.randomness import DetuningProfile, NoisePlan, sample_detuning_profile

GRID = LatticeSpec()


def _profile(amplitude=0.4, segments=40, dz=2.0, seed=0, idx=0, lattice=GRID):
    return sample_detuning_profile(NoisePlan(amplitude, dz, segments, seed=seed), lattice.n_modes, idx)


def _random_hermitian(rng, n):
    a = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    return (a + a.conj().T) / 2


def test_segment_hamiltonian_adds_diagonal_only():
    h0 = build_coupling_matrix(GRID)
    values = np.zeros((3, 25))
    values[1, 3] = 0.4
    prof = DetuningProfile(values, NoisePlan(0.4, 2.0, 3), 0)
    assert np.array_equal(segment_hamiltonian(h0, prof, 0), h0.entries)
    h = segment_hamiltonian(h0, prof, 1)
    assert h[3, 3] == 11660.4
    off = ~np.eye(25, dtype=bool)
    assert np.array_equal(h[off], h0.entries[off])
    assert np.array_equal(h, h.T)
    with pytest.raises(IndexError):
        segment_hamiltonian(h0, prof, 3)
    with pytest.raises(ValueError):
        segment_hamiltonian(build_coupling_matrix(LatticeSpec.chain(24)), prof, 0)


def test_unitary_of_zero_is_identity():
    assert np.array_equal(unitary_of_segment(np.zeros((4, 4)), 3.0), np.eye(4))


def test_two_mode_closed_form():
    c, dz = 0.225, 2.7
    u = unitary_of_segment(np.array([[0, c], [c, 0]]), dz)
    expected = np.array([[np.cos(c * dz), -1j * np.sin(c * dz)], [-1j * np.sin(c * dz), np.cos(c * dz)]])
    assert np.abs(u - expected).max() < 1e-14


def test_random_hermitian_unitarity_and_expm():
    rng = np.random.default_rng(1)
    for n in (2, 5, 25):
        h = _random_hermitian(rng, n)
        u = unitary_of_segment(h, 1.3)
        assert unitarity_residual(u) < 1e-10
        assert np.abs(u - expm(-1j * h * 1.3)).max() < 1e-10


def test_rejects_bad_segment_input():
    with pytest.raises(ValueError):
        unitary_of_segment(np.array([[0, 1], [0, 0]]), 1.0)
    with pytest.raises(ValueError):
        unitary_of_segment(np.eye(2), 0.0)
    with pytest.raises(ValueError):
        unitary_of_segment(np.ones((2, 3)), 1.0)


def test_zero_amplitude_matches_single_exponential():
    prof = _profile(amplitude=0.0, segments=40)
    snaps = evolve_chip(EvolutionRequest(GRID, prof, 12, (5, 17, 40)))
    h0 = build_coupling_matrix(GRID).entries
    for z, u in snaps:
        assert np.abs(u - constant_propagator(h0, z)).max() < 1e-9
        # expm without the offset; the global phase is applied by hand to stay accurate
        ref = expm(-1j * (h0 - 11660.0 * np.eye(25)) * z) * np.exp(-1j * 11660.0 * z)
        assert np.abs(u - ref).max() < 1e-9


def test_two_segments_is_the_product():
    prof = _profile(segments=2)
    h0 = build_coupling_matrix(GRID)
    [(z, u)] = evolve_chip(EvolutionRequest(GRID, prof, None, (2,)))
    assert z == 4.0
    u0 = unitary_of_segment(segment_hamiltonian(h0, prof, 0), 2.0, offset=h0.beta0)
    u1 = unitary_of_segment(segment_hamiltonian(h0, prof, 1), 2.0, offset=h0.beta0)
    assert np.abs(u - u1 @ u0).max() < 1e-10


def test_prefix_consistency():
    prof = _profile(segments=40, seed=5, idx=3)
    h0 = build_coupling_matrix(GRID)
    snaps = dict(evolve_chip(EvolutionRequest(GRID, prof, None, (10, 25))))
    link = np.eye(25, dtype=complex)
    for k in range(10, 25):
        link = unitary_of_segment(segment_hamiltonian(h0, prof, k), 2.0, offset=h0.beta0) @ link
    assert np.abs(snaps[50.0] - link @ snaps[20.0]).max() < 1e-10


def test_snapshots_are_unitary_at_8cm():
    for idx in range(17):
        for _, u in evolve_chip(EvolutionRequest(GRID, _profile(idx=idx), 12, (10, 20, 40))):
            assert unitarity_residual(u) < 1e-10


def test_beta0_does_not_change_probabilities():
    prof = _profile(segments=40, seed=2)
    flat = LatticeSpec(beta0=0.0)
    [(_, a)] = evolve_chip(EvolutionRequest(GRID, prof, 12, (40,)))
    [(_, b)] = evolve_chip(EvolutionRequest(flat, prof, 12, (40,)))
    assert np.abs(output_distribution(a, 12) - output_distribution(b, 12)).max() < 1e-14


def test_small_step_taylor_remainder():
    rng = np.random.default_rng(3)
    ratios = []
    for _ in range(10):
        h = _random_hermitian(rng, 6)
        cs = []
        for dz in (1e-3, 5e-4, 2.5e-4):
            u = unitary_of_segment(h, dz)
            cs.append(np.abs(u - (np.eye(6) - 1j * h * dz)).max() / dz ** 2)
        ratios.append(max(cs) / min(cs))
        # the remainder is dominated by h^2/2
        assert cs[-1] <= np.abs(h @ h).max()
    assert max(ratios) < 1.01


def test_pure_walk_matches_dense_oracle():
    h0 = build_coupling_matrix(GRID).couplings()
    w, v = np.linalg.eigh(h0)
    psi = v @ (np.exp(-1j * w * 80.0) * v[12])
    [(_, u)] = evolve_chip(EvolutionRequest(GRID, _profile(amplitude=0.0), 12, (40,)))
    assert np.abs(output_distribution(u, 12) - np.abs(psi) ** 2).max() < 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32), idx=st.integers(0, 1000), k=st.integers(1, 30))
def test_distributions_are_normalized(seed, idx, k):
    [(_, u)] = evolve_chip(EvolutionRequest(GRID, _profile(segments=30, seed=seed, idx=idx), 12, (k,)))
    p = output_distribution(u, seed % 25)
    assert p.min() >= 0 and abs(p.sum() - 1) < 1e-12


def test_identity_distribution():
    p = output_distribution(np.eye(25), 7)
    assert p[7] == 1 and p.sum() == 1
    with pytest.raises(ValueError):
        output_distribution(np.eye(25), 25)


def test_zero_length_is_identity():
    [(z, u)] = evolve_chip(EvolutionRequest(GRID, _profile(segments=3), None, (0,)))
    assert z == 0.0 and np.array_equal(u, np.eye(25))


def test_request_validation():
    prof = _profile(segments=10)
    with pytest.raises(ValueError):
        EvolutionRequest(GRID, prof, None, (11,))
    with pytest.raises(ValueError):
        EvolutionRequest(GRID, prof, None, (5, 3))
    with pytest.raises(ValueError):
        EvolutionRequest(GRID, prof, 25)
    with pytest.raises(ValueError):
        EvolutionRequest(LatticeSpec.chain(24), prof)


def test_json_round_trip():
    [(_, u)] = evolve_chip(EvolutionRequest(GRID, _profile(segments=5), None, (5,)))
    assert np.array_equal(unitary_from_json(unitary_to_json(u)), u)
