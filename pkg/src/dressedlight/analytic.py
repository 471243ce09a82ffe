"""Closed-form benchmarks for the excitation-conserving coupling.

With the counter-rotating terms switched off the Hamiltonian is block
diagonal in the total excitation number, and the low blocks are small
enough to diagonalize by hand.  These ladders anchor the numerics, and
a few thermally weighted transition sequences give a closed-form
low-temperature estimate of the equal-time photon correlation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, sqrt

import numpy as np


def jc_energies(n, g, omega0=1.0):
    """Single-emitter doublet in the n-excitation sector, as (lower, upper).

    The sector splits to n omega0 -/+ sqrt(n) g; the uncoupled ground
    state completes the ladder at 0.
    """
    if n < 1:
        raise ValueError("sector index must be >= 1")
    split = sqrt(n) * g
    return (n * omega0 - split, n * omega0 + split)


def jc_ladder(max_sector, g, omega0=1.0):
    """All single-emitter levels through the given sector, ascending."""
    levels = [0.0]
    for n in range(1, max_sector + 1):
        levels.extend(jc_energies(n, g, omega0))
    return np.sort(np.asarray(levels))


def tc_energies_n2(n, g, omega0=1.0):
    """Two-emitter sector energies without counter-rotating terms, sorted.

    Sector n holds one state (n = 0), three (n = 1) or four (n >= 2).
    The antisymmetric emitter combination decouples and contributes the
    coupling-independent value n omega0 for n >= 1, degenerate for
    n >= 2 with the middle symmetric level.
    """
    if n < 0:
        raise ValueError("sector index must be >= 0")
    if n == 0:
        return np.array([0.0])
    if n == 1:
        split = sqrt(2.0) * g
        return np.sort(np.array([omega0 - split, omega0, omega0 + split]))
    split = sqrt(2.0) * sqrt(2.0 * n - 1.0) * g
    return np.sort(
        np.array([n * omega0 - split, n * omega0, n * omega0, n * omega0 + split])
    )


def scaling_energies(n_emitters, g, omega0=1.0):
    """Lowest two excited multiplets of the symmetric sector.

    Returns (first, second): the one-excitation pair omega0 -/+ sqrt(N) g
    and the two-excitation set, which is a pair 2 omega0 -/+ sqrt(2) g
    for a single emitter and the triple {2 omega0, 2 omega0 -/+
    sqrt(2) sqrt(2N-1) g} otherwise.  The triple diagonalizes the
    tridiagonal symmetric-sector block with couplings sqrt(2N) g and
    sqrt(2(N-1)) g, so both splittings grow like sqrt(N) g.
    """
    if n_emitters < 1:
        raise ValueError("n_emitters must be >= 1")
    s1 = sqrt(n_emitters) * g
    first = np.array([omega0 - s1, omega0 + s1])
    if n_emitters == 1:
        s2 = sqrt(2.0) * g
        second = np.array([2 * omega0 - s2, 2 * omega0 + s2])
    else:
        s2 = sqrt(2.0) * sqrt(2.0 * n_emitters - 1.0) * g
        second = np.array([2 * omega0 - s2, 2 * omega0, 2 * omega0 + s2])
    return first, np.sort(second)


def scaling_map(n_emitters, g, limit):
    """Equivalent single-emitter coupling reproducing the low spectrum.

    Without counter-rotating terms the one-excitation splitting fixes
    g -> sqrt(N) g; with them the relevant collective coupling grows
    linearly, g -> N g.
    """
    if limit == "tc":
        return sqrt(n_emitters) * g
    if limit == "dicke":
        return n_emitters * g
    raise ValueError("limit must be 'tc' or 'dicke'")


@dataclass(frozen=True)
class G2Approximation:
    """Closed-form g2(0) estimate with its validity flag.

    trusted is False above the coupling where the second and third
    excited levels cross and the transition bookkeeping changes.
    """

    value: float
    trusted: bool
    crossing_g: float
    variant: str

    def __float__(self):
        return self.value


def _jc_state(n, sign):
    # Components over [(photon n, emitter ground), (photon n-1, emitter excited)].
    return {(n, 0): 1.0 / sqrt(2.0), (n - 1, 1): sign / sqrt(2.0)}


def _lowering_element(bra, ket):
    # <bra| a |ket> over the component dictionaries.
    total = 0.0
    for (n, e), amp in ket.items():
        if n >= 1 and (n - 1, e) in bra:
            total += bra[(n - 1, e)] * amp * sqrt(n)
    return total


def _emission_element(bra, e_bra, ket, e_ket):
    # Downward matrix element of the quadrature derivative (x0 = 1):
    # -i (E_ket - E_bra) <bra| (-i a) |ket> = -(E_ket - E_bra) <bra|a|ket>.
    return -(e_ket - e_bra) * _lowering_element(bra, ket)


def tc_g2_approximation(g, temperature, omega0=1.0, refined=False):
    """Low-temperature estimate of g2(0) for one emitter, rotating coupling.

    The basic variant keeps the lowest decay sequence through each of
    the first two sectors; the refined variant adds the sequences
    through the upper one- and two-excitation levels.  Valid well below
    the crossing coupling omega0 / (1 + sqrt(2)).
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if g < 0:
        raise ValueError("g must be non-negative")
    beta = 1.0 / temperature
    r2 = sqrt(2.0)

    if not refined:
        denominator = 0.5 * (omega0 - g) ** 2 * exp(-beta * (omega0 - g))
        numerator = (
            (3.0 + sqrt(8.0)) / 8.0 * (omega0 - (r2 - 1.0) * g) ** 2 * (omega0 - g) ** 2
            + 0.25
            * (omega0 - (r2 - 1.0) * g)
            * (omega0**2 - g**2)
            * (omega0 - (r2 + 1.0) * g)
            + (3.0 - sqrt(8.0)) / 8.0 * (omega0 - (r2 + 1.0) * g) ** 2 * (omega0 + g) ** 2
        ) * exp(-beta * (2.0 * omega0 - r2 * g))
        variant = "basic"
    else:
        ground = {(0, 0): 1.0}
        one = {s: _jc_state(1, s) for s in (-1.0, +1.0)}
        two = {s: _jc_state(2, s) for s in (-1.0, +1.0)}
        e_one = {s: omega0 + s * g for s in (-1.0, +1.0)}
        e_two = {s: 2.0 * omega0 + s * r2 * g for s in (-1.0, +1.0)}

        denominator = sum(
            _emission_element(ground, 0.0, one[s], e_one[s]) ** 2
            * exp(-beta * e_one[s])
            for s in (-1.0, +1.0)
        )
        numerator = 0.0
        for s2 in (-1.0, +1.0):
            amplitude = sum(
                _emission_element(ground, 0.0, one[s1], e_one[s1])
                * _emission_element(one[s1], e_one[s1], two[s2], e_two[s2])
                for s1 in (-1.0, +1.0)
            )
            numerator += amplitude**2 * exp(-beta * e_two[s2])
        variant = "refined"

    crossing = omega0 / (1.0 + r2)
    return G2Approximation(
        value=float(numerator / denominator**2),
        trusted=bool(g < crossing),
        crossing_g=crossing,
        variant=variant,
    )
