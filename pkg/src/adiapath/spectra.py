"""Dense Hermitian eigensolving and gap scans along the path.

The gap at a path position is the energy difference between the ground
state and the first level that is distinct from it beyond a degeneracy
tolerance; its minimum over s sets the run time an adiabatic evolution
needs. Eigensolving delegates to LAPACK through numpy.linalg.eigh,
which satisfies the residual and orthonormality contracts checked in
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError

COLLECTIVE_MAX_DIM = 5001
DEFAULT_GRID_POINTS = 201
HERMITICITY_ATOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def ground_energy(self):
        return float(self.values[0])


@dataclass(frozen=True)
class GapProfile:
    """Gap E1 - E0 sampled along an ascending s grid."""

    s_grid: np.ndarray
    e0: np.ndarray
    e1: np.ndarray
    gaps: np.ndarray
    min_gap: float
    argmin_s: float


def _checked_hermitian(h, max_dim):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InputError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] > max_dim:
        raise CapacityError(
            f"dense eigensolves capped at dimension {max_dim}, got {h.shape[0]}"
        )
    if np.abs(h - h.conj().T).max() > HERMITICITY_ATOL:
        raise InputError("matrix is not Hermitian")
    return h


def eigensystem(h, max_dim=COLLECTIVE_MAX_DIM):
    """Full spectrum of a Hermitian matrix."""
    h = _checked_hermitian(h, max_dim)
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(values, vectors)


def degeneracy_tolerance(values):
    """Default level-resolution scale: 1e-8 times the spectral range."""
    scale = max(abs(float(values[0])), abs(float(values[-1])), 1.0)
    return 1e-8 * scale


def _distinct_gap(values, tol=None):
    if tol is None:
        tol = degeneracy_tolerance(values)
    e0 = float(values[0])
    above = values[values > e0 + tol]
    if above.size == 0:
        return e0, e0, 0.0
    return e0, float(above[0]), float(above[0]) - e0


def gap_scan(hamiltonian_at, s_grid=None, degeneracy_tol=None):
    """Gap profile of s -> H(s) over an ascending grid in [0, 1].

    A degenerate ground level reports the gap to the first distinct
    level above the degeneracy tolerance (0 if the spectrum is flat).
    """
    if s_grid is None:
        s_grid = np.linspace(0.0, 1.0, DEFAULT_GRID_POINTS)
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size == 0:
        raise InputError("empty s grid")
    if np.any(np.diff(s_grid) <= 0) or s_grid[0] < 0.0 or s_grid[-1] > 1.0:
        raise InputError("s grid must be strictly ascending within [0, 1]")
    e0s, e1s, gaps = [], [], []
    for s in s_grid:
        h = _checked_hermitian(hamiltonian_at(s), COLLECTIVE_MAX_DIM)
        values = np.linalg.eigvalsh(h)
        e0, e1, gap = _distinct_gap(values, degeneracy_tol)
        e0s.append(e0)
        e1s.append(e1)
        gaps.append(gap)
    gaps = np.array(gaps)
    k = int(np.argmin(gaps))
    return GapProfile(
        s_grid, np.array(e0s), np.array(e1s), gaps, float(gaps[k]), float(s_grid[k])
    )


def ground_projector(eigsys, tol=None):
    """Projector onto the ground space; returns (projector, degeneracy)."""
    if tol is None:
        tol = degeneracy_tolerance(eigsys.values)
    elif tol <= 0:
        raise InputError("degeneracy tolerance must be positive")
    mask = eigsys.values <= eigsys.values[0] + tol
    vecs = eigsys.vectors[:, mask]
    return vecs @ vecs.conj().T, int(mask.sum())


def min_gap_refine(hamiltonian_at, profile, window=1e-4, degeneracy_tol=None):
    """Golden-section refinement of a coarse gap minimum.

    Searches the bracket formed by the grid neighbors of the coarse
    argmin; never returns a gap above the coarse minimum.
    """
    if profile.s_grid.size == 0:
        raise InputError("empty coarse profile")

    def gap_at(s):
        values = np.linalg.eigvalsh(hamiltonian_at(s))
        return _distinct_gap(values, degeneracy_tol)[2]

    k = int(np.argmin(profile.gaps))
    lo = profile.s_grid[max(k - 1, 0)]
    hi = profile.s_grid[min(k + 1, profile.s_grid.size - 1)]
    best_s, best_gap = float(profile.s_grid[k]), float(profile.gaps[k])
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = gap_at(x1), gap_at(x2)
    if f1 < best_gap:
        best_s, best_gap = x1, f1
    if f2 < best_gap:
        best_s, best_gap = x2, f2
    while b - a > window:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = gap_at(x1)
            s, f = x1, f1
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = gap_at(x2)
            s, f = x2, f2
        if f < best_gap:
            best_s, best_gap = float(s), float(f)
    return best_s, best_gap
