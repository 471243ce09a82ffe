"""Comparison solver: master equation with bare lowering operators.

Instead of splitting the coupling operators by dressed transition
frequency, this variant keeps only their bare rotating components
(the photon and emitter lowering operators) and evaluates all bath
rates at the resonance frequency.  Its stationary state follows from
the null space of the vectorized generator and generally differs from
the dressed-basis result once the coupling is strong.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .dissipation import bose_occupation
from .model import ModelParams, build_hamiltonian, build_operators

DEFAULT_QO_NMAX = 15
MAX_QO_DIM = 128


class DegenerateSteadyStateError(RuntimeError):
    """The generator has more than one stationary state."""


@dataclass
class QoChannel:
    """Bare lowering operator with its up/down rates."""

    label: str
    s_plus: np.ndarray
    chi_down: float
    chi_up: float


def _qo_params(params, n_max):
    if n_max is None:
        n_max = min(params.n_max, DEFAULT_QO_NMAX)
    return params.updated(n_max=n_max)


def qo_channels(params, ops):
    """Default channel set: cavity quadrature plus every emitter."""
    nbar = (
        bose_occupation(params.omega0, params.temperature)
        if params.temperature > 0
        else 0.0
    )
    gamma0 = params.gamma  # Ohmic density at the resonance frequency
    channels = [
        QoChannel(
            label="cavity",
            s_plus=-1j * params.x0 * ops.a,
            chi_down=gamma0 * (nbar + 1.0),
            chi_up=gamma0 * nbar,
        )
    ]
    for j, sm in enumerate(ops.sigma_minus):
        channels.append(
            QoChannel(
                label=f"emitter_{j}",
                s_plus=-1j * sm,
                chi_down=gamma0 * (nbar + 1.0),
                chi_up=gamma0 * nbar,
            )
        )
    return channels


def _dissipator(op_sparse):
    """chi (S rho S+ - {S+ S, rho}/2) in column-stacked vectorization."""
    dim = op_sparse.shape[0]
    eye = sp.identity(dim, format="csr")
    sdag_s = (op_sparse.conj().T @ op_sparse).tocsr()
    return (
        sp.kron(op_sparse.conj(), op_sparse)
        - 0.5 * sp.kron(eye, sdag_s)
        - 0.5 * sp.kron(sdag_s.T, eye)
    )


def qo_liouvillian(params, n_max=None):
    """Sparse vectorized generator; returns (liouvillian, ops, h)."""
    params = _qo_params(params, n_max)
    if params.dim > MAX_QO_DIM:
        raise ValueError(
            f"dimension {params.dim} too large for the comparison solver "
            f"(limit {MAX_QO_DIM}); lower n_max"
        )
    ops = build_operators(params)
    h = build_hamiltonian(params, ops)
    h_s = sp.csr_matrix(h)
    eye = sp.identity(params.dim, format="csr")
    liouv = -1j * (sp.kron(eye, h_s) - sp.kron(h_s.T, eye))
    for ch in qo_channels(params, ops):
        s_plus = sp.csr_matrix(ch.s_plus)
        liouv = liouv + ch.chi_down * _dissipator(s_plus)
        if ch.chi_up > 0:
            liouv = liouv + ch.chi_up * _dissipator(s_plus.conj().T)
    return liouv.tocsr(), ops, h


def _solve_with_trace_row(liouv, dim, row, refine=2):
    """Replace one equation by the trace constraint and solve.

    A couple of iterative-refinement sweeps recover the small
    populations, which otherwise carry the absolute noise of the
    factorization.
    """
    a = liouv.tolil(copy=True)
    a[row, :] = 0.0
    for k in range(dim):
        a[row, k * dim + k] = 1.0
    a = a.tocsc()
    b = np.zeros(dim * dim, dtype=complex)
    b[row] = 1.0
    lu = spla.splu(a)
    x = lu.solve(b)
    for _ in range(refine):
        x = x + lu.solve(b - a @ x)
    return x.reshape((dim, dim), order="F")


@dataclass
class QoStationary:
    """Stationary state of the comparison generator."""

    rho: np.ndarray
    params: ModelParams
    residual: float
    min_eigenvalue: float


def qo_stationary_state(params, n_max=None, check_unique=True):
    """Stationary density matrix of the bare-operator master equation.

    Solves the null-space problem directly with a trace constraint,
    hermitizes and renormalizes, and verifies positivity.  With
    check_unique a second solve with a different pinned equation guards
    against a degenerate stationary manifold.
    """
    if params.temperature <= 0:
        raise ValueError("the comparison solver needs temperature > 0")
    liouv, ops, _ = qo_liouvillian(params, n_max)
    dim = ops.dim
    rho = _solve_with_trace_row(liouv, dim, 0)
    if check_unique:
        other = _solve_with_trace_row(liouv, dim, dim * dim - 1)
        if np.max(np.abs(rho - other)) > 1e-8 * max(1.0, np.max(np.abs(rho))):
            raise DegenerateSteadyStateError(
                "stationary state is not unique (pinned-row solves disagree)"
            )
    residual = float(np.max(np.abs(liouv @ rho.reshape(-1, order="F"))))
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    eigs = np.linalg.eigvalsh(rho)
    if eigs.min() < -1e-8:
        raise RuntimeError(f"stationary state not positive: min eig {eigs.min():.3e}")
    return QoStationary(
        rho=rho,
        params=_qo_params(params, n_max),
        residual=residual,
        min_eigenvalue=float(eigs.min()),
    )


def qo_propagate(params, rho0, t, n_max=None):
    """Evolve an initial density matrix for time t with the generator."""
    if t < 0:
        raise ValueError("t must be non-negative")
    liouv, ops, _ = qo_liouvillian(params, n_max)
    dim = ops.dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 must have shape {(dim, dim)}")
    propagator = scipy.linalg.expm(liouv.toarray() * t)
    vec = propagator @ rho0.reshape(-1, order="F")
    return vec.reshape((dim, dim), order="F")


def qo_g2_zero(params, n_max=None, dressed=False, floor=1e-30,
               stationary=None):
    """Equal-time degree-two coherence in the comparison stationary state.

    With dressed=False this is the photon-number statistic
    <a+ a+ a a> / <a+ a>^2.  With dressed=True the emission operator of
    the dressed basis is used instead, for the same stationary state.
    """
    if stationary is None:
        stationary = qo_stationary_state(params, n_max)
    rho = stationary.rho
    qp = stationary.params
    ops = build_operators(qp)
    if dressed:
        from .observables import emission_operator
        from .spectral import diagonalize

        eig = diagonalize(build_hamiltonian(qp, ops), 1e-9 * qp.omega0)
        xdot_eig = emission_operator(eig, ops.x)
        lower = eig.vectors @ xdot_eig @ eig.vectors.conj().T
    else:
        lower = ops.a
    raise_op = lower.conj().T
    denominator = float(np.trace(rho @ raise_op @ lower).real)
    if denominator < floor:
        raise ValueError(f"stationary emission {denominator:.3e} below floor")
    numerator = float(np.trace(rho @ raise_op @ raise_op @ lower @ lower).real)
    return numerator / denominator**2


def qo_convergence_estimate(params, n_max):
    """Trace distance between stationary states at n_max and 2 n_max."""
    low = qo_stationary_state(params, n_max, check_unique=False)
    high = qo_stationary_state(params, 2 * n_max, check_unique=False)
    n_low = low.params.n_max
    n_high = high.params.n_max
    # Embed the small-cutoff state: flat index (e, n) -> e (n_max+1) + n.
    n_conf = 2**params.n_emitters
    idx = (
        np.arange(n_conf)[:, None] * (n_high + 1) + np.arange(n_low + 1)[None, :]
    ).ravel()
    padded = np.zeros_like(high.rho)
    padded[np.ix_(idx, idx)] = low.rho
    return trace_distance(padded, high.rho)


def trace_distance(rho, sigma):
    """Half the trace norm of the difference."""
    diff = rho - sigma
    vals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return 0.5 * float(np.abs(vals).sum())
