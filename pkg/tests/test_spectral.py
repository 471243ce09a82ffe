"""Eigen decomposition, phase gauge, and transition grouping."""

import numpy as np
import pytest

from dressedlight import (
    ModelParams,
    build_hamiltonian,
    build_operators,
    diagonalize,
    group_transitions,
)


def _random_hermitian_with_spectrum(energies, seed):
    rng = np.random.default_rng(seed)
    n = len(energies)
    q, _ = np.linalg.qr(rng.standard_normal((n, n))
                        + 1j * rng.standard_normal((n, n)))
    return q @ np.diag(energies) @ q.conj().T


def test_diagonalize_recovers_spectrum():
    energies = np.array([-1.5, 0.0, 0.3, 2.2, 7.1])
    h = _random_hermitian_with_spectrum(energies, seed=11)
    eig = diagonalize(h)
    np.testing.assert_allclose(eig.energies, energies, atol=1e-12)
    # eigenvector property, column by column
    for k in range(5):
        np.testing.assert_allclose(h @ eig.vectors[:, k],
                                   energies[k] * eig.vectors[:, k],
                                   atol=1e-12)
    assert not eig.degenerate
    assert eig.group_index.tolist() == [0, 1, 2, 3, 4]


def test_diagonalize_rejects_non_hermitian():
    h = np.array([[0.0, 1.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        diagonalize(h)


def test_phase_gauge_largest_component_real_positive():
    h = _random_hermitian_with_spectrum([0.0, 0.4, 1.1, 3.0], seed=2)
    eig = diagonalize(h)
    for k in range(4):
        v = eig.vectors[:, k]
        idx = np.argmax(np.abs(v))
        assert abs(v[idx].imag) < 1e-14
        assert v[idx].real > 0
    # the gauge makes the decomposition reproducible across equivalent inputs
    again = diagonalize(h.copy())
    np.testing.assert_allclose(eig.vectors, again.vectors, atol=0)


def test_degenerate_grouping():
    energies = [0.0, 1.0, 1.0 + 1e-12, 2.0, 2.0 + 5e-13, 2.0 + 9e-13]
    h = _random_hermitian_with_spectrum(energies, seed=5)
    eig = diagonalize(h, delta_e=1e-9)
    assert eig.degenerate
    assert eig.group_index.tolist() == [0, 1, 1, 2, 2, 2]
    assert [len(m) for m in eig.group_members] == [1, 2, 3]
    np.testing.assert_allclose(eig.group_energy, [0.0, 1.0, 2.0],
                               atol=1e-11)
    # tightening the tolerance splits the groups again
    fine = diagonalize(h, delta_e=1e-14)
    assert not fine.degenerate


def test_to_eigenbasis_matches_direct_projection():
    p = ModelParams(1, 0.3, 0.1, 0.1, n_max=4)
    ops = build_operators(p)
    eig = diagonalize(build_hamiltonian(p, ops))
    s = eig.to_eigenbasis(ops.x)
    np.testing.assert_allclose(
        s, eig.vectors.conj().T @ ops.x @ eig.vectors, atol=1e-13)
    # Hermitian operators stay Hermitian in the new basis
    np.testing.assert_allclose(s, s.conj().T, atol=1e-13)


def test_transition_frequencies_and_zero_group():
    p = ModelParams(1, 0.3, 0.0, 0.1, n_max=4)
    ops = build_operators(p)
    eig = diagonalize(build_hamiltonian(p, ops))
    trans = group_transitions(eig, ops.x)
    # the pinned zero-frequency group sits exactly at 0
    assert trans.omegas[trans.zero_group] == 0.0
    # every advertised group frequency is realized by its member pairs
    for k in range(trans.omegas.size):
        for a, b in zip(trans.pair_a[trans.starts[k]:trans.stops[k]],
                        trans.pair_b[trans.starts[k]:trans.stops[k]]):
            omega_ab = eig.group_energy[b] - eig.group_energy[a]
            assert abs(omega_ab - trans.omegas[k]) < 1e-8
    # frequencies come out sorted and unique at this coupling
    assert np.all(np.diff(trans.omegas) > 0)
    assert trans.collision_count == 0


def test_reconstruct_roundtrip():
    p = ModelParams(2, 0.4, 0.2, 0.1, n_max=3)
    ops = build_operators(p)
    eig = diagonalize(build_hamiltonian(p, ops))
    trans = group_transitions(eig, ops.x)
    s = eig.to_eigenbasis(ops.x)
    np.testing.assert_allclose(trans.reconstruct(), s, atol=1e-13)
    # components are disjoint: their squared weights add up
    total = sum(np.abs(trans.component(k)) ** 2
                for k in range(trans.omegas.size))
    np.testing.assert_allclose(total, np.abs(s) ** 2, atol=1e-13)


def test_harmonic_ladder_collisions_flagged():
    # uncoupled cavity: all upward transitions share the same frequency
    p = ModelParams(1, 0.0, 0.0, 0.1, n_max=5)
    ops = build_operators(p)
    eig = diagonalize(build_hamiltonian(p, ops))
    trans = group_transitions(eig, ops.x)
    assert trans.collision_count > 0
    assert 1.0 in np.round(trans.collision_omegas, 12)


def test_squared_elements_match():
    p = ModelParams(1, 0.25, 0.25, 0.15, n_max=4)
    ops = build_operators(p)
    eig = diagonalize(build_hamiltonian(p, ops))
    trans = group_transitions(eig, ops.x)
    np.testing.assert_allclose(trans.s_eigen, eig.to_eigenbasis(ops.x),
                               atol=1e-14)
    np.testing.assert_allclose(trans.s_abs2, np.abs(trans.s_eigen) ** 2,
                               atol=1e-14)
