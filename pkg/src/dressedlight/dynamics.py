"""Time evolution of the dressed-basis density matrix.

Populations follow the Pauli rate equation dp/dt = G p; every
off-diagonal element (m, n) decouples and decays with the factor
exp(-(z_m + conj(z_n)) t), whose imaginary part carries the transition
phase.  The stationary state of the rate equation is the Boltzmann
distribution over the dressed levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class DegenerateGroundError(ValueError):
    """T = 0 with a degenerate ground level: stationary limit undefined."""


@dataclass
class StationaryState:
    """Thermal populations over the dressed levels plus the rate residual."""

    populations: np.ndarray
    temperature: float
    residual: float

    @property
    def dim(self):
        return self.populations.size


def stationary_state(eig, rates, residual_tol=1e-9):
    """Boltzmann distribution over the dressed levels.

    Verifies that the distribution is annihilated by the Pauli generator
    and records the residual; a residual above residual_tol raises, since
    it indicates inconsistent rates.
    """
    energies = eig.energies
    if rates.temperature == 0:
        if len(eig.group_members[0]) > 1:
            raise DegenerateGroundError(
                "degenerate ground level at T = 0; populations undefined"
            )
        p = np.zeros(energies.size)
        p[0] = 1.0
    else:
        shifted = (energies - energies[0]) / rates.temperature
        p = np.zeros(energies.size)
        keep = shifted < 700
        p[keep] = np.exp(-shifted[keep])
        p /= p.sum()
    residual = float(np.max(np.abs(rates.generator @ p)))
    if residual > residual_tol:
        raise RuntimeError(
            f"stationary residual {residual:.3e} exceeds {residual_tol:.1e}"
        )
    return StationaryState(populations=p, temperature=rates.temperature,
                           residual=residual)


class DiagonalPropagator:
    """exp(G t) applied to population vectors.

    Uses the eigendecomposition of the (real, nonsymmetric) generator;
    falls back to scaling-and-squaring when the eigenvector matrix is
    ill-conditioned.
    """

    def __init__(self, generator, cond_limit=1e12):
        self.generator = np.asarray(generator, dtype=float)
        self._eig = None
        try:
            w, r = np.linalg.eig(self.generator)
            r_inv = np.linalg.inv(r)
            cond = np.linalg.norm(r, 1) * np.linalg.norm(r_inv, 1)
            if np.isfinite(cond) and cond < cond_limit:
                self._eig = (w, r, r_inv)
        except np.linalg.LinAlgError:
            pass

    @property
    def uses_eigendecomposition(self):
        return self._eig is not None

    def propagate(self, p0, t):
        """Populations after time t >= 0."""
        p0 = np.asarray(p0)
        if self._eig is None:
            return scipy.linalg.expm(self.generator * t) @ p0
        w, r, r_inv = self._eig
        out = r @ (np.exp(w * t) * (r_inv @ p0))
        return out.real if np.isrealobj(p0) else out

    def weighted_curve(self, weights, p0, times):
        """sum_n weights[n] * (exp(G t) p0)[n] for every t, vectorized."""
        times = np.asarray(times, dtype=float)
        if self._eig is None:
            return np.array(
                [np.dot(weights, self.propagate(p0, t)) for t in times]
            )
        w, r, r_inv = self._eig
        u = (weights @ r) * (r_inv @ p0)  # length-D mode amplitudes
        return np.exp(np.multiply.outer(times, w)) @ u


def _propagator_for(rates):
    if getattr(rates, "_propagator", None) is None:
        rates._propagator = DiagonalPropagator(rates.generator)
    return rates._propagator


def propagate_diagonal(p0, t, rates):
    """Populations exp(G t) p0 after time t."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return _propagator_for(rates).propagate(p0, t)


def offdiagonal_factor(m, n, t, rates):
    """Decay factor exp(-(z_m + conj(z_n)) t) of element (m, n)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return np.exp(-(rates.z[m] + np.conj(rates.z[n])) * t)


@dataclass
class ConditionalMatrix:
    """Density-like matrix split for propagation.

    The diagonal evolves through the Pauli generator; each off-diagonal
    entry (kept as index triples) evolves independently with its decay
    factor.
    """

    diagonal: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    @classmethod
    def from_matrix(cls, mat):
        mat = np.asarray(mat)
        diag = np.diag(mat).copy()
        off = mat.copy()
        np.fill_diagonal(off, 0.0)
        rows, cols = np.nonzero(off)
        return cls(diagonal=diag, rows=rows, cols=cols,
                   values=off[rows, cols])

    @property
    def trace(self):
        return self.diagonal.sum()


class RegressionEvolver:
    """Two-time expectation values through the quantum regression rule.

    Precomputes everything needed to evaluate
    Tr[observable * Lambda_t(rho)] for a batch of times, where Lambda_t
    propagates the diagonal through the rate equation and the
    off-diagonals through their decay factors.
    """

    def __init__(self, rates, rho, observable):
        if not isinstance(rho, ConditionalMatrix):
            rho = ConditionalMatrix.from_matrix(rho)
        self.rates = rates
        self.rho = rho
        observable = np.asarray(observable)
        self._propagator = _propagator_for(rates)
        self._obs_diag = np.diag(observable).copy()
        # Off-diagonal contribution sum_k obs[n_k, m_k] rho[m_k, n_k]
        # exp(-(z_m + conj(z_n)) t), dropping exact zero coefficients.
        coeff = observable[rho.cols, rho.rows] * rho.values
        keep = coeff != 0
        self._coeff = coeff[keep]
        self._zsum = rates.z[rho.rows[keep]] + np.conj(rates.z[rho.cols[keep]])

    def curve(self, times):
        """Expectation value at every time, as a complex array."""
        times = np.asarray(times, dtype=float)
        out = np.asarray(
            self._propagator.weighted_curve(self._obs_diag, self.rho.diagonal, times),
            dtype=complex,
        )
        if self._coeff.size:
            # Chunk over times to bound the (times x pairs) temporary.
            max_chunk = max(1, int(4e6 // max(1, self._coeff.size)))
            for start in range(0, times.size, max_chunk):
                sl = slice(start, start + max_chunk)
                out[sl] += np.exp(
                    -np.multiply.outer(times[sl], self._zsum)
                ) @ self._coeff
        return out


def regression_g2_kernel(rho_cond, tau, observable, rates):
    """Tr[observable * Lambda_tau(rho_cond)] for a single delay."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    evolver = RegressionEvolver(rates, rho_cond, observable)
    return complex(evolver.curve(np.array([tau]))[0])
