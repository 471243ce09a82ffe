"""Eigensystem of the coupled Hamiltonian and grouping of transitions.

Secular treatment of the dissipators needs every system operator S split
into components S_w that connect eigenstates separated by a fixed energy
w.  Levels are first clustered into degenerate groups (spacing below
delta_e); transition frequencies are then built from group energies and
clustered with tolerance delta_omega, so elements inside a degenerate
level land exactly in the w = 0 group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_DELTA = 1e-9


@dataclass
class EigenSystem:
    """Sorted eigensystem with degenerate levels clustered.

    energies are ascending; vectors[:, k] belongs to energies[k] with the
    largest-magnitude component rotated to the positive real axis.
    group_index[k] is the degenerate group of state k and group_energy[a]
    the mean energy of group a.
    """

    energies: np.ndarray
    vectors: np.ndarray
    delta_e: float
    group_index: np.ndarray
    group_energy: np.ndarray
    group_members: tuple

    @property
    def dim(self):
        return self.energies.size

    @property
    def n_groups(self):
        return self.group_energy.size

    @property
    def degenerate(self):
        return any(len(m) > 1 for m in self.group_members)

    def to_eigenbasis(self, operator):
        """Matrix elements <m|S|n> of a lab-frame operator."""
        return self.vectors.conj().T @ operator @ self.vectors


def diagonalize(h, delta_e=DEFAULT_DELTA):
    """Diagonalize a Hermitian matrix and cluster degenerate levels.

    Parameters
    ----------
    h : (D, D) array_like
        Hermitian matrix; hermiticity is checked to 1e-12 relative.
    delta_e : float
        Absolute energy tolerance for treating two levels as degenerate.

    Returns
    -------
    EigenSystem
    """
    h = np.asarray(h)
    scale = np.linalg.norm(h)
    if scale > 0 and np.linalg.norm(h - h.conj().T) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    energies, vectors = np.linalg.eigh(h)
    vectors = np.ascontiguousarray(vectors)

    # Fixed gauge: rotate the largest-magnitude component of each vector
    # onto the positive real axis (first index wins on ties).
    for k in range(energies.size):
        col = vectors[:, k]
        i = int(np.argmax(np.abs(col)))
        piv = col[i]
        if piv != 0:
            vectors[:, k] = col * (np.conj(piv) / np.abs(piv))

    # Gap-based clustering of the sorted energies.
    if energies.size:
        breaks = np.nonzero(np.diff(energies) >= delta_e)[0]
        starts = np.concatenate(([0], breaks + 1))
        stops = np.concatenate((breaks + 1, [energies.size]))
    else:
        starts = stops = np.array([], dtype=int)
    members = tuple(np.arange(b, e) for b, e in zip(starts, stops))
    group_index = np.empty(energies.size, dtype=int)
    group_energy = np.empty(len(members))
    for a, idx in enumerate(members):
        group_index[idx] = a
        group_energy[a] = energies[idx].mean()

    return EigenSystem(
        energies=energies,
        vectors=vectors,
        delta_e=delta_e,
        group_index=group_index,
        group_energy=group_energy,
        group_members=members,
    )


@dataclass
class TransitionSet:
    """Components S_w of one operator, grouped by transition frequency.

    A transition group collects all matrix elements <m|S|n> whose
    frequency E_n - E_m falls within delta_omega of the group frequency.
    Groups are stored as slices into the list of ordered level-group
    pairs sorted by frequency; element blocks are materialized on demand
    with block().  collision_count counts frequency groups (w >= 0) that
    merge more than one distinct level pair, the situation in which the
    secular equations of motion are not reliable.
    """

    eig: EigenSystem
    s_eigen: np.ndarray
    s_abs2: np.ndarray
    delta_omega: float
    omegas: np.ndarray
    pair_a: np.ndarray
    pair_b: np.ndarray
    starts: np.ndarray
    stops: np.ndarray
    zero_group: int
    collision_count: int
    collision_omegas: np.ndarray

    @property
    def n_groups(self):
        return self.omegas.size

    @property
    def has_collisions(self):
        return self.collision_count > 0

    def block(self, k):
        """Elements of group k as (rows, cols, values) index triples."""
        rows = []
        cols = []
        members = self.eig.group_members
        for a, b in zip(
            self.pair_a[self.starts[k] : self.stops[k]],
            self.pair_b[self.starts[k] : self.stops[k]],
        ):
            r, c = np.meshgrid(members[a], members[b], indexing="ij")
            rows.append(r.ravel())
            cols.append(c.ravel())
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        return rows, cols, self.s_eigen[rows, cols]

    def component(self, k):
        """Group k as a dense matrix in the eigenbasis."""
        out = np.zeros_like(self.s_eigen)
        rows, cols, vals = self.block(k)
        out[rows, cols] = vals
        return out

    def reconstruct(self):
        """Sum of all components; equals the full operator."""
        out = np.zeros_like(self.s_eigen)
        for k in range(self.n_groups):
            rows, cols, vals = self.block(k)
            out[rows, cols] = vals
        return out


def group_transitions(eig, s, delta_omega=DEFAULT_DELTA):
    """Group the matrix elements of an operator by transition frequency.

    Parameters
    ----------
    eig : EigenSystem
    s : (D, D) array_like
        Operator in the lab frame.
    delta_omega : float
        Absolute clustering tolerance for transition frequencies.

    Returns
    -------
    TransitionSet
    """
    s_eigen = eig.to_eigenbasis(np.asarray(s))
    s_abs2 = np.abs(s_eigen) ** 2

    ge = eig.group_energy
    n_grp = ge.size
    # Ordered level pair (a, b) holds elements <m in a|S|n in b> at
    # frequency E_b - E_a.
    pair_omega = (ge[None, :] - ge[:, None]).ravel()
    order = np.argsort(pair_omega, kind="stable")
    sorted_omega = pair_omega[order]
    pair_a = order // n_grp
    pair_b = order % n_grp

    if sorted_omega.size:
        breaks = np.nonzero(np.diff(sorted_omega) >= delta_omega)[0]
        starts = np.concatenate(([0], breaks + 1))
        stops = np.concatenate((breaks + 1, [sorted_omega.size]))
    else:
        starts = stops = np.array([], dtype=int)

    omegas = np.array([sorted_omega[b:e].mean() for b, e in zip(starts, stops)])
    # The diagonal pairs (a, a) sit at exactly 0.0; pin their group there.
    zero_group = int(np.argmin(np.abs(omegas))) if omegas.size else 0
    if omegas.size:
        omegas[zero_group] = 0.0

    # A group merging distinct level pairs means distinct transitions
    # share a frequency within delta_omega.  The zero group naturally
    # holds the n_grp diagonal pairs; anything beyond those collides.
    collisions = []
    for k, (b, e) in enumerate(zip(starts, stops)):
        size = e - b
        if k == zero_group:
            if size > n_grp:
                collisions.append(0.0)
        elif size > 1 and omegas[k] > 0:
            collisions.append(omegas[k])

    return TransitionSet(
        eig=eig,
        s_eigen=s_eigen,
        s_abs2=s_abs2,
        delta_omega=delta_omega,
        omegas=omegas,
        pair_a=pair_a,
        pair_b=pair_b,
        starts=starts,
        stops=stops,
        zero_group=zero_group,
        collision_count=len(collisions),
        collision_omegas=np.asarray(collisions),
    )
