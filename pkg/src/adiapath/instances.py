"""Local cost functions over bit strings.

A cost function is a sum of clause terms, each a nonnegative integer
value table over a few bits. Assignments are tuples of 0/1 values; the
cost of an assignment is the sum of clause table lookups. This module
holds the data model, the canonical builders (symmetric triple instance,
3-SAT, Exact Cover), a brute-force minimizer used as the test oracle,
and a line-oriented text format.

Conventions shared with the operator modules: bits inside a clause are
listed in ascending index order and the table is indexed by the
big-endian binary word of the clause's sub-assignment (first listed bit
is the most significant).

Instance file format::

    # comment lines start with '#'
    n 5
    clause 0 1 2 : 0 3 3 1 3 1 1 1
    clause 1 3 4 : 1 0 0 0 0 0 0 0

The header gives the bit count; each clause line lists the bit indices,
a colon, then the 2^b table values in binary order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError, ParseError

# An assignment is an ordered tuple of n values in {0, 1}.
Assignment = tuple

BRUTE_FORCE_MAX_BITS = 24

# Value table of the symmetric triple clause, indexed by (z, z', z'') in
# binary order: 0 when all three bits are 0, 3 when exactly one is 1,
# 1 otherwise.
SYMMETRIC_TRIPLE_TABLE = (0, 3, 3, 1, 3, 1, 1, 1)


@dataclass(frozen=True)
class Clause:
    """A cost term on a few bits: ascending indices plus a value table."""

    bits: tuple
    table: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        table = tuple(int(v) for v in self.table)
        if len(bits) == 0:
            raise InputError("clause needs at least one bit")
        if any(b < 0 for b in bits):
            raise InputError(f"negative bit index in {bits}")
        if any(bits[i] >= bits[i + 1] for i in range(len(bits) - 1)):
            raise InputError(f"clause bits must be strictly ascending, got {bits}")
        if len(table) != 1 << len(bits):
            raise InputError(
                f"table length {len(table)} does not match arity {len(bits)}"
            )
        if any(v < 0 for v in table):
            raise InputError("table values must be nonnegative")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "table", table)

    @property
    def arity(self):
        return len(self.bits)


@dataclass(frozen=True)
class Instance:
    """A cost function: n bits and a list of clauses."""

    n: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(self.clauses)
        if self.n < 1:
            raise InputError("instance needs at least one bit")
        for c in clauses:
            if max(c.bits) >= self.n:
                raise InputError(
                    f"clause bits {c.bits} out of range for n={self.n}"
                )
        object.__setattr__(self, "clauses", clauses)


def eval_clause(clause, assignment):
    """Value of one clause on an assignment (table lookup)."""
    if len(assignment) <= max(clause.bits):
        raise InputError(
            f"assignment of length {len(assignment)} too short for clause bits "
            f"{clause.bits}"
        )
    idx = 0
    for b in clause.bits:
        idx = (idx << 1) | (assignment[b] & 1)
    return clause.table[idx]


def eval_cost(instance, assignment):
    """Total cost: sum of all clause values."""
    if len(assignment) != instance.n:
        raise InputError(
            f"assignment length {len(assignment)} != instance size {instance.n}"
        )
    return sum(eval_clause(c, assignment) for c in instance.clauses)


def build_symmetric_instance(n):
    """Fully symmetric instance: one triple clause per ascending (i, j, k).

    Every clause carries the same table (0 for all-zeros, 3 for a single
    one, 1 otherwise), so the cost depends on the Hamming weight only and
    the unique minimum is the all-zeros string.
    """
    if n < 3:
        raise InputError(f"symmetric instance needs n >= 3, got {n}")
    clauses = tuple(
        Clause(bits, SYMMETRIC_TRIPLE_TABLE)
        for bits in itertools.combinations(range(n), 3)
    )
    return Instance(n, clauses)


def build_3sat_clause(bits, false_assignment):
    """3-SAT clause: cost 1 on its unique falsifying sub-assignment.

    ``false_assignment`` is the 3-tuple of bit values that violates the
    clause; all other seven sub-assignments cost 0.
    """
    bits = tuple(bits)
    if len(bits) != 3:
        raise InputError("3-SAT clause needs exactly three bits")
    fa = tuple(int(v) & 1 for v in false_assignment)
    if len(fa) != 3:
        raise InputError("false assignment needs exactly three values")
    idx = (fa[0] << 2) | (fa[1] << 1) | fa[2]
    table = tuple(1 if t == idx else 0 for t in range(8))
    return Clause(bits, table)


def build_exact_cover_clause(bits):
    """Exact Cover clause: cost 0 iff exactly one of the three bits is 1."""
    bits = tuple(bits)
    if len(bits) != 3:
        raise InputError("Exact Cover clause needs exactly three bits")
    table = tuple(0 if bin(t).count("1") == 1 else 1 for t in range(8))
    return Clause(bits, table)


def is_3sat_instance(instance):
    """True when every clause is a one-hot 3-bit table (a 3-SAT clause)."""
    return all(
        c.arity == 3 and sorted(c.table) == [0] * 7 + [1] for c in instance.clauses
    )


def cost_vector(instance):
    """Costs of all 2^n assignments, indexed by the big-endian bit word."""
    if instance.n > BRUTE_FORCE_MAX_BITS:
        raise CapacityError(
            f"full enumeration capped at n={BRUTE_FORCE_MAX_BITS}, got {instance.n}"
        )
    n = instance.n
    idx = np.arange(1 << n, dtype=np.int64)
    costs = np.zeros(1 << n, dtype=np.int64)
    for c in instance.clauses:
        sub = np.zeros(1 << n, dtype=np.int64)
        for b in c.bits:
            sub = (sub << 1) | ((idx >> (n - 1 - b)) & 1)
        costs += np.asarray(c.table, dtype=np.int64)[sub]
    return costs


def min_cost_bruteforce(instance):
    """Exhaustive minimum: (min value, complete list of minimizers)."""
    costs = cost_vector(instance)
    best = int(costs.min())
    n = instance.n
    minimizers = [
        tuple((int(i) >> (n - 1 - b)) & 1 for b in range(n))
        for i in np.nonzero(costs == best)[0]
    ]
    return best, minimizers


def parse_instance(text):
    """Parse the line-oriented instance format. Raises ParseError with the
    offending line number on malformed input."""
    n = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "n":
            if n is not None:
                raise ParseError("duplicate header", lineno)
            if len(fields) != 2:
                raise ParseError("header must be 'n <int>'", lineno)
            try:
                n = int(fields[1])
            except ValueError:
                raise ParseError(f"bad bit count {fields[1]!r}", lineno) from None
        elif fields[0] == "clause":
            if n is None:
                raise ParseError("clause before 'n' header", lineno)
            if ":" not in fields:
                raise ParseError("clause line needs ':'", lineno)
            sep = fields.index(":")
            try:
                bits = tuple(int(f) for f in fields[1:sep])
                table = tuple(int(f) for f in fields[sep + 1 :])
            except ValueError:
                raise ParseError("clause fields must be integers", lineno) from None
            if len(set(bits)) != len(bits):
                raise ParseError(f"duplicate bit index in {bits}", lineno)
            try:
                clauses.append(Clause(bits, table))
            except InputError as exc:
                raise ParseError(str(exc), lineno) from None
        else:
            raise ParseError(f"unknown directive {fields[0]!r}", lineno)
    if n is None:
        raise ParseError("missing 'n <int>' header")
    try:
        return Instance(n, tuple(clauses))
    except InputError as exc:
        raise ParseError(str(exc)) from None


def serialize_instance(instance):
    """Inverse of parse_instance (round-trips exactly)."""
    lines = [f"n {instance.n}"]
    for c in instance.clauses:
        bits = " ".join(str(b) for b in c.bits)
        table = " ".join(str(v) for v in c.table)
        lines.append(f"clause {bits} : {table}")
    return "\n".join(lines) + "\n"
