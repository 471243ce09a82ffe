"""Emission spectrum and photon statistics of the cavity output.

The emitted field is represented by the lowering part of the time
derivative of the cavity quadrature, built in the dressed basis:
element (m, n) is -i (E_n - E_m) <m|X|n> for E_n > E_m and zero
otherwise.  The stationary spectrum is a sum of Lorentzians, one per
dressed transition, and the degree-two correlation function follows
from the regression rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dissipation import CAVITY_TAG, spectral_density
from .dynamics import ConditionalMatrix, RegressionEvolver

DENOMINATOR_FLOOR = 1e-30


class DarkStateError(ValueError):
    """No stationary emission: photon statistics undefined."""


def emission_operator(eig, x):
    """Lowering part of the quadrature derivative, in the eigenbasis.

    Strictly upper triangular in the energy ordering (rows below columns
    in energy); elements inside a degenerate level group are excluded,
    so the operator annihilates the ground level.
    """
    x_eig = eig.to_eigenbasis(np.asarray(x))
    e = eig.energies
    factor = -1j * (e[None, :] - e[:, None])
    lower = eig.group_index[None, :] > eig.group_index[:, None]
    return np.where(lower, factor * x_eig, 0.0)


@dataclass
class SpectrumResult:
    """Lorentzian decomposition and sampled curve of the emission spectrum.

    Peaks are sorted by center; weights are |<m|Xdot|n>|^2 p_n, centers
    the transition frequencies shifted by the imaginary decay parts, and
    half_widths the summed real decay rates.  emission_total is the full
    stationary emission rate sum, including peaks below the floor.
    """

    centers: np.ndarray
    half_widths: np.ndarray
    weights: np.ndarray
    omega: np.ndarray
    values: np.ndarray
    emission_total: float


def _emission_pairs(eig, rates, stat, xdot, weight_floor):
    weights_full = np.abs(xdot) ** 2 * stat.populations[None, :]
    rows, cols = np.nonzero(weights_full)
    w = weights_full[rows, cols]
    total = float(w.sum())
    if total > 0 and weight_floor > 0:
        keep = w >= weight_floor * total
        rows, cols, w = rows[keep], cols[keep], w[keep]
    z = rates.z
    centers = (z[cols] - z[rows]).imag
    half_widths = (z[rows] + z[cols]).real
    order = np.lexsort((cols, rows, centers))
    return centers[order], half_widths[order], w[order], total


def emission_spectrum(eig, rates, stat, omega_grid, xdot, weight_floor=1e-12):
    """Stationary emission spectrum sampled on a frequency grid.

    Parameters
    ----------
    eig, rates, stat
        Eigensystem, rate table and stationary populations.
    omega_grid : array_like
        Frequencies at which to sample the curve.
    xdot : (D, D) array
        Emission operator from emission_operator().
    weight_floor : float
        Peaks below this fraction of the total weight are dropped from
        the stored peak list (the curve and sum rule use the kept ones).

    Returns
    -------
    SpectrumResult
    """
    cavity = next(
        (c.channel for c in rates.channel_rates if c.channel.operator_tag == CAVITY_TAG),
        None,
    )
    if cavity is None:
        raise ValueError("rate table has no cavity channel")
    centers, half_widths, weights, total = _emission_pairs(
        eig, rates, stat, xdot, weight_floor
    )
    if centers.size and np.any(half_widths <= 0):
        raise ValueError("non-positive linewidth; all decay rates must be > 0")

    omega_grid = np.asarray(omega_grid, dtype=float)
    values = np.zeros_like(omega_grid)
    chunk = max(1, int(4e6 // max(1, centers.size)))
    for start in range(0, omega_grid.size, chunk):
        sl = slice(start, start + chunk)
        d = omega_grid[sl, None] - centers[None, :]
        values[sl] = (weights * half_widths / (d * d + half_widths**2)).sum(axis=1)
    values *= spectral_density(cavity, omega_grid) / np.pi

    return SpectrumResult(
        centers=centers,
        half_widths=half_widths,
        weights=weights,
        omega=omega_grid,
        values=values,
        emission_total=total,
    )


def spectrum_sum_rule(spectrum, core_halfwidths=40.0, tail_halfwidths=4000.0):
    """Numerical integral of the spectrum over the bath density.

    Integrates the bare Lorentzian sum on a peak-adapted grid (dense
    core plus logarithmic tails per peak); equals the total stationary
    emission up to integration and tail error.
    """
    points = [np.array([0.0])]
    for c, hw in zip(spectrum.centers, spectrum.half_widths):
        core = c + hw * np.linspace(-core_halfwidths, core_halfwidths, 1601)
        tail = hw * np.geomspace(core_halfwidths, tail_halfwidths, 240)
        points.extend((core, c + tail, c - tail))
    grid = np.unique(np.concatenate(points))
    dist = grid[:, None] - spectrum.centers[None, :]
    dens = (
        spectrum.weights
        * spectrum.half_widths
        / (dist * dist + spectrum.half_widths**2)
    ).sum(axis=1) / np.pi
    return float(np.trapezoid(dens, grid))


def cluster_weights(spectrum, tol=1e-8):
    """Peak weights summed over coincident centers, sorted ascending.

    Transitions that share a frequency split their weight between peaks
    in an eigenvector-gauge dependent way; only the per-center sum is
    well defined.  Returns (centers, weights) with one entry per
    frequency cluster.
    """
    if spectrum.centers.size == 0:
        return np.array([]), np.array([])
    order = np.argsort(spectrum.centers)
    centers = spectrum.centers[order]
    weights = spectrum.weights[order]
    merged_c = []
    merged_w = []
    start = 0
    for i in range(1, centers.size + 1):
        if i == centers.size or centers[i] - centers[start] > tol:
            merged_c.append(centers[start:i].mean())
            merged_w.append(weights[start:i].sum())
            start = i
    return np.asarray(merged_c), np.asarray(merged_w)


def integrated_emission(eig, stat, xdot):
    """Total stationary emission rate sum <Xdot+ Xdot->."""
    col_norms = (np.abs(xdot) ** 2).sum(axis=0)
    return float(np.dot(stat.populations, col_norms))


def g2_zero(eig, stat, xdot, floor=DENOMINATOR_FLOOR):
    """Equal-time degree-two coherence of the emitted field."""
    col_norms = (np.abs(xdot) ** 2).sum(axis=0)
    denominator = float(np.dot(stat.populations, col_norms))
    if denominator < floor:
        raise DarkStateError(
            f"stationary emission {denominator:.3e} below floor {floor:.1e}"
        )
    y = xdot @ xdot
    numerator = float(np.dot(stat.populations, (np.abs(y) ** 2).sum(axis=0)))
    return numerator / denominator**2


@dataclass
class G2Result:
    """Delay dependence of the degree-two coherence."""

    times: np.ndarray
    values: np.ndarray
    zero_value: float
    denominator: float
    max_imag: float


def g2_time(eig, rates, stat, t_grid, xdot, floor=DENOMINATOR_FLOOR):
    """Degree-two coherence g2(t) on a grid of delays.

    The conditional matrix Xdot- rho Xdot+ is propagated with the rate
    equation (diagonal) and the off-diagonal decay factors, then closed
    with the emission observable.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise ValueError("delays must be non-negative")
    col_norms = (np.abs(xdot) ** 2).sum(axis=0)
    denominator = float(np.dot(stat.populations, col_norms))
    if denominator < floor:
        raise DarkStateError(
            f"stationary emission {denominator:.3e} below floor {floor:.1e}"
        )
    rho_cond = (xdot * stat.populations[None, :]) @ xdot.conj().T
    observable = xdot.conj().T @ xdot
    evolver = RegressionEvolver(rates, ConditionalMatrix.from_matrix(rho_cond),
                                observable)
    raw = evolver.curve(t_grid) / denominator**2
    values = raw.real
    y = xdot @ xdot
    zero = float(np.dot(stat.populations, (np.abs(y) ** 2).sum(axis=0))) / denominator**2
    return G2Result(
        times=t_grid,
        values=values,
        zero_value=zero,
        denominator=denominator,
        max_imag=float(np.max(np.abs(raw.imag))) if raw.size else 0.0,
    )
