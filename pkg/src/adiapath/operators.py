"""Hamiltonian assembly for the interpolating path.

Each clause contributes three operators acting on its own bits: a
diagonal problem term holding the clause's value table, a transverse
beginning term (sum of single-bit projectors onto the ``-`` x state) and
an optional extra term, a zero-diagonal Hermitian matrix switched on
mid-path. The full path is

    H(s) = sum over clauses of  fB(s)*hb + fP(s)*hp + fE(s)*he

with the canonical schedules fB = 1-s, fP = s, fE = s*(1-s), so the
extra term vanishes at both endpoints.

Extra terms are generated by three proposals: ``P1`` draws an
independent random matrix per clause, ``P2`` shares a single matrix
across clauses of identical type, and ``P3`` (for 3-SAT) conjugates one
base matrix by the bit negations that relate each clause to the base
clause with falsifying assignment (0,0,0).

Embedding convention: clause bits ascending, big-endian (first bit of
the clause is the most significant bit of both the table index and the
basis index), matching the instances module.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import CapacityError, ConfigError, InputError, ParseError
from .instances import Instance, is_3sat_instance

APPLY_MAX_BITS = 26
MATERIALIZE_MAX_BITS = 12

PAULI_LETTERS = "0xyz"
PAULI_MATRICES = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

HERMITICITY_ATOL = 1e-12


def word_matrix(word):
    """Tensor product of single-bit Paulis for a word over '0xyz'."""
    mats = [PAULI_MATRICES[PAULI_LETTERS.index(ch)] for ch in word]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def pauli_words(arity):
    """All 4^b words over '0xyz' in lexicographic letter-index order."""
    return ["".join(w) for w in itertools.product(PAULI_LETTERS, repeat=arity)]


def _check_hermitian(A, atol=HERMITICITY_ATOL, what="matrix"):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"{what} must be square, got shape {A.shape}")
    if np.abs(A - A.conj().T).max() > atol * max(1.0, np.abs(A).max()):
        raise InputError(f"{what} is not Hermitian")


def clause_hp(clause):
    """Diagonal clause operator: the value table on the clause's bits."""
    return np.diag(np.asarray(clause.table, dtype=float))


def clause_hb(clause):
    """Transverse clause operator: one projector per clause bit.

    Each bit contributes (1 - sigma_x)/2, so the spectrum is {0, ..., b}
    and the ground state is the all-plus product state.
    """
    b = clause.arity
    dim = 1 << b
    half = np.array([[0.5, -0.5], [-0.5, 0.5]])
    out = np.zeros((dim, dim))
    for slot in range(b):
        mats = [np.eye(2)] * b
        mats[slot] = half
        term = mats[0]
        for m in mats[1:]:
            term = np.kron(term, m)
        out += term
    return out


def pauli_decompose(A):
    """Coefficients of A over tensor products of {identity, x, y, z}.

    Returns a real array of shape (4,)*b with
    ``coeffs[a, b, c] = trace(word(a,b,c) @ A) / 2^b``; the letters are
    indexed in the order '0xyz'. Reconstruction with pauli_reconstruct
    is exact. Requires a Hermitian input (which makes every coefficient
    real).
    """
    A = np.asarray(A, dtype=complex)
    _check_hermitian(A, what="decomposition input")
    dim = A.shape[0]
    b = dim.bit_length() - 1
    if 1 << b != dim:
        raise InputError(f"dimension {dim} is not a power of two")
    coeffs = np.zeros((4,) * b)
    for letters in itertools.product(range(4), repeat=b):
        word = "".join(PAULI_LETTERS[i] for i in letters)
        coeffs[letters] = np.trace(word_matrix(word) @ A).real / dim
    return coeffs


def pauli_reconstruct(coeffs):
    """Inverse of pauli_decompose."""
    coeffs = np.asarray(coeffs)
    b = coeffs.ndim
    dim = 1 << b
    out = np.zeros((dim, dim), dtype=complex)
    for letters in itertools.product(range(4), repeat=b):
        a = coeffs[letters]
        if a != 0.0:
            word = "".join(PAULI_LETTERS[i] for i in letters)
            out += a * word_matrix(word)
    return out


def negate_bits(A, mask):
    """Conjugate A by sigma_x on the masked bits (an involution).

    ``mask`` is a bit tuple in clause slot order, or the equivalent
    big-endian integer. Flipping bits permutes the basis, so spectrum,
    Hermiticity and the zero diagonal are all preserved.
    """
    A = np.asarray(A)
    dim = A.shape[0]
    b = dim.bit_length() - 1
    if isinstance(mask, (tuple, list)):
        if len(mask) != b:
            raise InputError(f"mask length {len(mask)} != clause arity {b}")
        m = 0
        for v in mask:
            m = (m << 1) | (int(v) & 1)
    else:
        m = int(mask)
        if not 0 <= m < dim:
            raise InputError(f"mask word {m} out of range for arity {b}")
    perm = np.arange(dim) ^ m
    return A[np.ix_(perm, perm)]


def xz_coupling_matrix():
    """Hand-picked real 8x8 coupling whose decomposition is exactly the
    six x-z cross words with coefficient -1 (no diagonal words).

    Used as the deterministic demonstration extra term: its collective
    limit is a pure x-z cross term and its sphere potential is
    -8 s (1-s) sin(theta) cos(theta) cos(phi).
    """
    A = np.zeros((8, 8))
    for t in (1, 2, 4):  # single ones, coupled to 000
        A[0, t] = A[t, 0] = -2.0
    for t in (3, 5, 6):  # single zeros, coupled to 111
        A[7, t] = A[t, 7] = 2.0
    return A


@dataclass(frozen=True)
class PerturbationConfig:
    """How to draw extra-term matrices.

    kind 'real-symmetric' draws i.i.d. uniform off-diagonal entries on
    [-half_width, half_width]; 'complex-hermitian' draws independent
    real and imaginary parts from the same interval and Hermitizes.
    The diagonal is always exactly zero.
    """

    proposal: str = "P2"
    kind: str = "real-symmetric"
    half_width: float = 3.0
    seed: int | None = None

    def __post_init__(self):
        if self.proposal not in ("P1", "P2", "P3", "none"):
            raise ConfigError(f"unknown proposal {self.proposal!r}")
        if self.kind not in ("real-symmetric", "complex-hermitian"):
            raise ConfigError(f"unknown entry distribution {self.kind!r}")
        if self.half_width < 0:
            raise ConfigError("half_width must be nonnegative")


def sample_matrix(rng, arity, kind="real-symmetric", half_width=3.0):
    """One zero-diagonal Hermitian matrix of size 2^arity."""
    dim = 1 << arity
    iu = np.triu_indices(dim, 1)
    if kind == "real-symmetric":
        M = np.zeros((dim, dim))
        M[iu] = rng.uniform(-half_width, half_width, len(iu[0]))
        return M + M.T
    if kind == "complex-hermitian":
        M = np.zeros((dim, dim), dtype=complex)
        M[iu] = rng.uniform(-half_width, half_width, len(iu[0])) + 1j * rng.uniform(
            -half_width, half_width, len(iu[0])
        )
        return M + M.conj().T
    raise ConfigError(f"unknown entry distribution {kind!r}")


def _clause_false_mask(clause):
    # One-hot 3-SAT table: the mask is the index of the single 1 entry.
    return clause.table.index(1)


def sample_perturbation(instance, config, rng=None):
    """Draw per-clause extra matrices according to the proposal.

    Returns a list aligned with ``instance.clauses`` (``None`` for
    proposal 'none'). Under P2 every entry is the same array object.
    """
    if config.proposal == "none":
        return None
    if rng is None:
        rng = np.random.default_rng(config.seed)
    clauses = instance.clauses
    if config.proposal == "P1":
        return [
            sample_matrix(rng, c.arity, config.kind, config.half_width)
            for c in clauses
        ]
    if config.proposal == "P2":
        if not clauses:
            raise ConfigError("P2 needs at least one clause")
        first = clauses[0]
        if any(c.arity != first.arity or c.table != first.table for c in clauses):
            raise ConfigError(
                "P2 requires all clauses to share one arity and one value table"
            )
        A = sample_matrix(rng, first.arity, config.kind, config.half_width)
        return [A] * len(clauses)
    # P3
    if not is_3sat_instance(instance):
        raise ConfigError("P3 is defined for 3-SAT instances only")
    A = sample_matrix(rng, 3, config.kind, config.half_width)
    return [negate_bits(A, _clause_false_mask(c)) for c in clauses]


def _canonical_schedules():
    return (lambda s: 1.0 - s, lambda s: s, lambda s: s * (1.0 - s))


@dataclass(frozen=True)
class _ClauseGroup:
    """Clauses of one arity, stacked for the application kernel."""

    positions: np.ndarray  # (C, b) descending bit positions in the index
    hb: np.ndarray  # (C, d, d)
    hp: np.ndarray  # (C, d, d)
    he: np.ndarray | None  # (C, d, d) or None


@dataclass(frozen=True)
class PathHamiltonian:
    """The assembled path: per-clause operator triples plus schedules."""

    instance: Instance
    groups: tuple
    schedules: tuple = field(default_factory=_canonical_schedules)

    @property
    def n(self):
        return self.instance.n

    @property
    def dim(self):
        return 1 << self.instance.n

    @property
    def has_extra(self):
        return any(g.he is not None for g in self.groups)


def build_path(instance, extra=None, schedules=None):
    """Assemble the PathHamiltonian for an instance.

    ``extra`` is an optional list of zero-diagonal Hermitian matrices
    aligned with the clauses (as produced by sample_perturbation).
    """
    if extra is not None and len(extra) != len(instance.clauses):
        raise InputError(
            f"extra list length {len(extra)} != clause count {len(instance.clauses)}"
        )
    n = instance.n
    by_arity = {}
    for ci, clause in enumerate(instance.clauses):
        by_arity.setdefault(clause.arity, []).append(ci)
    groups = []
    for arity, idxs in sorted(by_arity.items()):
        positions = np.array(
            [[n - 1 - b for b in instance.clauses[ci].bits] for ci in idxs],
            dtype=np.int64,
        )
        hb = np.stack([clause_hb(instance.clauses[ci]) for ci in idxs])
        hp = np.stack([clause_hp(instance.clauses[ci]) for ci in idxs])
        he = None
        if extra is not None:
            mats = []
            for ci in idxs:
                A = np.asarray(extra[ci])
                if A.shape != (1 << arity, 1 << arity):
                    raise InputError(
                        f"extra matrix for clause {ci} has shape {A.shape}, "
                        f"expected {(1 << arity, 1 << arity)}"
                    )
                _check_hermitian(A, what=f"extra matrix for clause {ci}")
                mats.append(A)
            dtype = complex if any(np.iscomplexobj(m) for m in mats) else float
            he = np.stack([m.astype(dtype) for m in mats])
        groups.append(_ClauseGroup(positions, hb, hp, he))
    sched = tuple(schedules) if schedules is not None else _canonical_schedules()
    if len(sched) != 3:
        raise InputError("schedules must be a (begin, final, extra) triple")
    return PathHamiltonian(instance, tuple(groups), sched)


def _combined_mats(path, s):
    """Per-group combined clause matrices at path position s."""
    fb, fp, fe = (f(s) for f in path.schedules)
    out = []
    for g in path.groups:
        W = fb * g.hb + fp * g.hp
        if g.he is not None and fe != 0.0:
            W = W + fe * g.he
        out.append(W)
    return out


def apply_path(path, s, psi):
    """Matrix-free action of H(s) on a state vector."""
    if path.n > APPLY_MAX_BITS:
        raise CapacityError(
            f"matrix-free application capped at n={APPLY_MAX_BITS}, got {path.n}"
        )
    psi = np.asarray(psi)
    if psi.shape != (path.dim,):
        raise InputError(f"state has shape {psi.shape}, expected ({path.dim},)")
    psi = np.ascontiguousarray(psi, dtype=complex)
    out = np.zeros(path.dim, dtype=complex)
    for g, W in zip(path.groups, _combined_mats(path, s)):
        _kernels.apply_clause_ops(
            psi, path.n, g.positions, np.ascontiguousarray(W, dtype=complex), out
        )
    return out


def _expanded_rest_indices(n, positions):
    """Basis indices with the clause bits zeroed, one per rest pattern."""
    x = np.arange(1 << (n - len(positions)), dtype=np.int64)
    for p in sorted(positions):
        low = x & ((1 << p) - 1)
        x = ((x >> p) << (p + 1)) | low
    return x


def _embed_sum(n, groups, which, dtype):
    """Dense sum of one operator family (hb / hp / he) over all clauses."""
    M = np.zeros((1 << n, 1 << n), dtype=dtype)
    for g in groups:
        mats = getattr(g, which)
        if mats is None:
            continue
        b = g.positions.shape[1]
        d = 1 << b
        for c in range(g.positions.shape[0]):
            pos = g.positions[c]
            base = _expanded_rest_indices(n, pos)
            offs = np.array(
                [
                    sum(((t >> (b - 1 - l)) & 1) << int(pos[l]) for l in range(b))
                    for t in range(d)
                ],
                dtype=np.int64,
            )
            rows = base[:, None, None] + offs[None, :, None]
            cols = base[:, None, None] + offs[None, None, :]
            M[rows, cols] += mats[c][None, :, :]
    return M


def dense_parts(path):
    """Dense (Hb, Hp, He) for the whole path; He is None without extra.

    Computed once per path and cached, so repeated materializations are
    a cheap linear combination.
    """
    if path.n > MATERIALIZE_MAX_BITS:
        raise CapacityError(
            f"dense materialization capped at n={MATERIALIZE_MAX_BITS}, got {path.n}"
        )
    cached = getattr(path, "_dense_parts", None)
    if cached is None:
        hb = _embed_sum(path.n, path.groups, "hb", float)
        hp = _embed_sum(path.n, path.groups, "hp", float)
        he = None
        if path.has_extra:
            dtype = (
                complex
                if any(g.he is not None and np.iscomplexobj(g.he) for g in path.groups)
                else float
            )
            he = _embed_sum(path.n, path.groups, "he", dtype)
        cached = (hb, hp, he)
        object.__setattr__(path, "_dense_parts", cached)
    return cached


def materialize_dense(path, s):
    """Dense Hermitian matrix of H(s); capped at n=12."""
    fb, fp, fe = (f(s) for f in path.schedules)
    hb, hp, he = dense_parts(path)
    M = fb * hb + fp * hp
    if he is not None and fe != 0.0:
        M = M + fe * he
    return M


def dense_path(path):
    """Callable s -> dense H(s), for gap scans and evolution."""
    return lambda s: materialize_dense(path, s)


def format_matrix(A):
    """Text form of a square complex matrix: rows of 're+imi' entries."""
    A = np.asarray(A, dtype=complex)
    rows = []
    for row in A:
        rows.append(" ".join(f"{v.real:.17g}{v.imag:+.17g}i" for v in row))
    return "\n".join(rows) + "\n"


_ENTRY_RE = re.compile(
    r"^(?P<re>[+-]?[0-9.]+(?:[eE][+-]?\d+)?)"
    r"(?:(?P<im>[+-][0-9.]+(?:[eE][+-]?\d+)?)i)?$"
)


def parse_matrix(text):
    """Inverse of format_matrix; accepts plain real entries too."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        entries = []
        for tok in line.split():
            m = _ENTRY_RE.match(tok)
            if not m:
                raise ParseError(f"bad matrix entry {tok!r}", lineno)
            re_part = float(m.group("re"))
            im_part = float(m.group("im")) if m.group("im") else 0.0
            entries.append(complex(re_part, im_part))
        rows.append(entries)
    if not rows:
        raise ParseError("empty matrix text")
    dim = len(rows)
    if any(len(r) != dim for r in rows):
        raise ParseError("matrix rows must all have the same length as the row count")
    A = np.array(rows, dtype=complex)
    if np.abs(A.imag).max() == 0.0:
        A = A.real
    return A
