"""Shared test utilities: random problem generators and independent oracles."""

import numpy as np

from adiapath import instances

PAULI = {
    "0": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_word(word):
    out = PAULI[word[0]]
    for ch in word[1:]:
        out = np.kron(out, PAULI[ch])
    return out


def random_instance(rng, n=None, max_clauses=6, max_value=5):
    """Random instance with arbitrary nonnegative 3-bit tables."""
    if n is None:
        n = int(rng.integers(3, 11))
    n_clauses = int(rng.integers(1, max_clauses + 1))
    clauses = []
    for _ in range(n_clauses):
        bits = tuple(sorted(rng.choice(n, size=3, replace=False).tolist()))
        table = tuple(int(v) for v in rng.integers(0, max_value + 1, size=8))
        clauses.append(instances.Clause(bits, table))
    return instances.Instance(n, tuple(clauses))


def random_3sat_instance(rng, n, n_clauses, satisfiable=False):
    """Random distinct 3-SAT clauses; optionally resample until satisfiable."""
    while True:
        seen = set()
        clauses = []
        while len(clauses) < n_clauses:
            bits = tuple(sorted(rng.choice(n, size=3, replace=False).tolist()))
            mask = tuple(int(v) for v in rng.integers(0, 2, size=3))
            if (bits, mask) in seen:
                continue
            seen.add((bits, mask))
            clauses.append(instances.build_3sat_clause(bits, mask))
        inst = instances.Instance(n, tuple(clauses))
        if not satisfiable or instances.min_cost_bruteforce(inst)[0] == 0:
            return inst


def clause_false_assignment(clause):
    f = clause.table.index(1)
    return ((f >> 2) & 1, (f >> 1) & 1, f & 1)


def negate_3sat_instance(inst, global_mask):
    """Flip the given bits in every clause of a 3-SAT instance."""
    clauses = []
    for c in inst.clauses:
        fa = clause_false_assignment(c)
        flipped = tuple(fa[k] ^ global_mask[c.bits[k]] for k in range(3))
        clauses.append(instances.build_3sat_clause(c.bits, flipped))
    return instances.Instance(inst.n, tuple(clauses))


def product_coherent_state(n, theta, phi):
    """Full-space coherent product state (independent of the collective
    module, used as its oracle)."""
    one = np.array([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)])
    psi = one
    for _ in range(n - 1):
        psi = np.kron(psi, one)
    return psi
