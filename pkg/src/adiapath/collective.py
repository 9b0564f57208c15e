"""Total-spin-sector treatment of the fully symmetric instance.

Permutation symmetry confines the dynamics of the symmetric triple
instance to the maximal-spin sector, an (n+1)-dimensional space spanned
by the Dicke states. This module builds the collective spin matrices,
the closed-form beginning/problem Hamiltonians, the leading-order
collective form of the demonstration extra term, spin coherent states,
and the scaled path whose coherent-state expectation converges to the
effective potential as n grows.

Basis: Dicke states ordered by Hamming weight w = 0..n, so Sz is
diagonal with entries n/2 - w (all-zeros first).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, lgamma, log, pi, sin

import numpy as np

from .errors import CapacityError, InputError

COLLECTIVE_MAX_BITS = 5000


@dataclass(frozen=True)
class SpinOps:
    """Collective spin matrices for total spin n/2."""

    n: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


@dataclass(frozen=True)
class CollectiveHamiltonian:
    """An (n+1)-dimensional Hermitian matrix, raw or (2/n)^3-scaled."""

    n: int
    matrix: np.ndarray
    scaled: bool = False


@dataclass(frozen=True)
class CoherentState:
    """Product state pointing along (theta, phi), in the Dicke basis."""

    n: int
    theta: float
    phi: float
    amplitudes: np.ndarray

    def expectation(self, matrix):
        """Real expectation value of a Hermitian (n+1)-dim matrix."""
        m = matrix.matrix if isinstance(matrix, CollectiveHamiltonian) else matrix
        return float(np.real(np.vdot(self.amplitudes, m @ self.amplitudes)))


def _check_n(n, minimum=1):
    if n < minimum:
        raise InputError(f"need n >= {minimum}, got {n}")
    if n > COLLECTIVE_MAX_BITS:
        raise CapacityError(
            f"collective sector capped at n={COLLECTIVE_MAX_BITS}, got {n}"
        )


def spin_matrices(n):
    """Sx, Sy, Sz for total spin j = n/2 in the weight basis."""
    _check_n(n)
    w = np.arange(n + 1)
    sz = np.diag(n / 2.0 - w)
    # raising: weight w -> w-1, amplitude sqrt(w (n - w + 1))
    off = 0.5 * np.sqrt(w[1:] * (n - w[1:] + 1.0))
    sx = np.zeros((n + 1, n + 1))
    sx[np.arange(n), np.arange(1, n + 1)] = off
    sx = sx + sx.T
    sy = np.zeros((n + 1, n + 1), dtype=complex)
    sy[np.arange(n), np.arange(1, n + 1)] = -1j * off
    sy = sy + sy.conj().T
    return SpinOps(n, sx, sy, sz)


def symmetric_cost_by_weight(n):
    """Costs of weight-w assignments under the symmetric triple instance.

    Counting triples by how many of their bits are set gives
    3 C(w,1) C(n-w,2) + C(w,2) C(n-w,1) + C(w,3).
    """
    w = np.arange(n + 1, dtype=float)
    return (
        3.0 * w * (n - w) * (n - w - 1) / 2.0
        + w * (w - 1) / 2.0 * (n - w)
        + w * (w - 1) * (w - 2) / 6.0
    )


def hp_collective(n):
    """Problem Hamiltonian in the collective sector (diagonal)."""
    _check_n(n, minimum=3)
    return CollectiveHamiltonian(n, np.diag(symmetric_cost_by_weight(n)))


def hb_collective(n):
    """Beginning Hamiltonian: C(n-1,2) (n/2 - Sx); gap C(n-1,2)."""
    _check_n(n, minimum=3)
    prefactor = (n - 1) * (n - 2) / 2.0
    sx = spin_matrices(n).sx
    return CollectiveHamiltonian(n, prefactor * (n / 2.0 * np.eye(n + 1) - sx))


def he_collective(n):
    """Leading-order collective extra term of the x-z coupling matrix:
    -2n (Sx Sz + Sz Sx)."""
    _check_n(n, minimum=3)
    ops = spin_matrices(n)
    prod = ops.sx @ ops.sz
    return CollectiveHamiltonian(n, -2.0 * n * (prod + prod.T))


def scaled_path_collective(n, s, include_extra=False):
    """(2/n)^3 [ (1-s) Hb + s Hp + s(1-s) He ] in the collective sector."""
    if not 0.0 <= s <= 1.0:
        raise InputError(f"path position s={s} outside [0, 1]")
    scale = (2.0 / n) ** 3
    m = (1.0 - s) * hb_collective(n).matrix + s * hp_collective(n).matrix
    if include_extra:
        m = m + (s * (1.0 - s)) * he_collective(n).matrix
    return CollectiveHamiltonian(n, scale * m, scaled=True)


def collective_path(n, include_extra=False, scaled=False):
    """Callable s -> matrix for gap scans and evolution."""

    hb = hb_collective(n).matrix
    hp = hp_collective(n).matrix
    he = he_collective(n).matrix if include_extra else None
    scale = (2.0 / n) ** 3 if scaled else 1.0

    def hamiltonian_at(s):
        m = (1.0 - s) * hb + s * hp
        if he is not None:
            m = m + (s * (1.0 - s)) * he
        return scale * m

    return hamiltonian_at


def coherent_state(n, theta, phi):
    """Spin coherent state |theta, phi> in the weight basis.

    Product of single-bit states (cos(theta/2), e^{i phi} sin(theta/2));
    the weight-w amplitude is sqrt(C(n,w)) cos^(n-w) sin^w e^{i phi w},
    computed through log-binomials so large n does not overflow.
    """
    _check_n(n)
    if not 0.0 <= theta <= pi:
        raise InputError(f"theta={theta} outside [0, pi]")
    if not -pi < phi <= pi + 1e-12:
        raise InputError(f"phi={phi} outside (-pi, pi]")
    amps = np.zeros(n + 1, dtype=complex)
    c, s = cos(theta / 2.0), sin(theta / 2.0)
    if s == 0.0:
        amps[0] = 1.0
    elif c == 0.0:
        amps[n] = 1.0
    else:
        lc, ls = log(c), log(s)
        w = np.arange(n + 1, dtype=float)
        ln_binom = (
            lgamma(n + 1)
            - np.array([lgamma(k + 1) + lgamma(n - k + 1) for k in range(n + 1)])
        )
        amps = np.exp(0.5 * ln_binom + (n - w) * lc + w * ls) * np.exp(1j * phi * w)
    state = CoherentState(n, float(theta), float(phi), amps)
    return state


def dicke_embedding(n):
    """(2^n, n+1) isometry from the collective sector to the full space.

    Column w is the normalized uniform superposition of all weight-w
    basis states. Desk scale only (n <= 20).
    """
    if n > 20:
        raise CapacityError(f"full-space embedding capped at n=20, got {n}")
    dim = 1 << n
    weights = np.array([bin(i).count("1") for i in range(dim)])
    d = np.zeros((dim, n + 1))
    for w in range(n + 1):
        cols = weights == w
        d[cols, w] = 1.0 / np.sqrt(cols.sum())
    return d
