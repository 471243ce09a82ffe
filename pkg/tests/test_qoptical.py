"""Bare-operator master equation: stationary state and photon statistics.

The thermal-ladder oracle is rebuilt in the tests from bit counts and Fock
indices, independent of the operator machinery under test.
"""

import numpy as np
import pytest

from dressedlight import (
    ModelParams,
    build_hamiltonian,
    qo_g2_zero,
    qo_liouvillian,
    qo_propagate,
    qo_stationary_state,
    trace_distance,
)
from dressedlight.qoptical import qo_convergence_estimate


def _thermal_ladder(n_emitters, n_max, temperature, omega0=1.0):
    """diag of exp(-beta w0 N_t)/Z in the configuration x Fock basis."""
    diag = []
    for e in range(2 ** n_emitters):
        excited = bin(e).count("1")
        for n in range(n_max + 1):
            diag.append(np.exp(-omega0 * (n + excited) / temperature))
    diag = np.array(diag)
    return np.diag(diag / diag.sum())


def test_tc_stationary_matches_thermal_ladder():
    for n_emitters in (1, 2):
        p = ModelParams(n_emitters, 0.4, 0.0, 0.2)
        state = qo_stationary_state(p, n_max=8)
        oracle = _thermal_ladder(n_emitters, 8, 0.2)
        assert trace_distance(state.rho, oracle) < 1e-6


def test_tc_stationary_independent_of_coupling():
    # without counter-rotating terms the bare-operator equation relaxes to
    # the same thermal ladder at every coupling strength
    weak = qo_stationary_state(ModelParams(1, 0.05, 0.0, 0.15), n_max=8)
    strong = qo_stationary_state(ModelParams(1, 0.7, 0.0, 0.15), n_max=8)
    none = qo_stationary_state(ModelParams(1, 0.0, 0.0, 0.15), n_max=8)
    assert trace_distance(weak.rho, strong.rho) < 1e-9
    assert trace_distance(weak.rho, none.rho) < 1e-9


def test_dicke_stationary_differs_from_dressed_thermal():
    p = ModelParams(1, 0.5, 0.5, 0.1, n_max=10)
    state = qo_stationary_state(p, n_max=10)
    h = build_hamiltonian(p)
    energies, vectors = np.linalg.eigh(h)
    boltz = np.exp(-(energies - energies[0]) / p.temperature)
    rho_dressed = (vectors * (boltz / boltz.sum())[None, :]) @ vectors.conj().T
    assert trace_distance(state.rho, rho_dressed) > 1e-3


def test_time_evolution_reaches_nullspace_solution():
    p = ModelParams(1, 0.3, 0.3, 0.2)
    state = qo_stationary_state(p, n_max=6)
    dim = 2 * 7
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[0, 0] = 1.0
    evolved = qo_propagate(p, rho0, 50.0 / p.gamma, n_max=6)
    assert trace_distance(evolved, state.rho) < 1e-6
    assert np.trace(evolved).real == pytest.approx(1.0, abs=1e-10)


def test_liouvillian_preserves_trace():
    p = ModelParams(2, 0.4, 0.4, 0.15)
    liouv, ops, _ = qo_liouvillian(p, n_max=5)
    dim = ops.dim
    trace_functional = np.zeros(dim * dim)
    trace_functional[np.arange(dim) * dim + np.arange(dim)] = 1.0
    assert np.abs(trace_functional @ liouv).max() < 1e-10


def test_stationary_state_wellformed():
    p = ModelParams(2, 0.6, 0.6, 0.1)
    state = qo_stationary_state(p, n_max=6)
    np.testing.assert_allclose(state.rho, state.rho.conj().T, atol=1e-12)
    assert np.trace(state.rho).real == pytest.approx(1.0, abs=1e-12)
    assert state.min_eigenvalue >= -1e-8
    assert state.residual < 1e-10
    with pytest.raises(ValueError):
        qo_stationary_state(ModelParams(1, 0.3, 0.3, 0.0))


def test_g2_exactly_thermal_without_counter_rotation():
    for n_emitters in (1, 2):
        for g in (0.1, 0.8):
            for temperature in (0.05, 0.3):
                p = ModelParams(n_emitters, g, 0.0, temperature)
                value = qo_g2_zero(p, n_max=10)
                assert value == pytest.approx(2.0, abs=1e-6)
    assert qo_g2_zero(ModelParams(1, 0.0, 0.0, 0.2), n_max=10) == \
        pytest.approx(2.0, abs=1e-6)


def test_g2_never_subpoissonian_with_counter_rotation():
    # the bare-operator equation misses the antibunching entirely
    for g, temperature in ((0.2, 0.05), (0.5, 0.07), (0.8, 0.1)):
        p = ModelParams(1, g, g, temperature)
        assert qo_g2_zero(p, n_max=12) >= 1.0 - 1e-3


def test_dressed_variant_is_distinct_and_labeled():
    p = ModelParams(1, 0.5, 0.5, 0.1)
    state = qo_stationary_state(p, n_max=10)
    bare = qo_g2_zero(p, n_max=10, stationary=state)
    dressed = qo_g2_zero(p, n_max=10, dressed=True, stationary=state)
    assert bare == pytest.approx(qo_g2_zero(p, n_max=10), rel=1e-12)
    assert abs(dressed - bare) > 0.1


def test_cutoff_convergence_estimate():
    # doubling the cutoff barely moves the state at moderate temperature
    p = ModelParams(1, 0.4, 0.4, 0.15)
    assert qo_convergence_estimate(p, 7) < 1e-4
