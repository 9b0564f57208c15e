import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adiapath import instances, operators
from adiapath.errors import CapacityError, ConfigError, InputError, ParseError

from _helpers import (
    clause_false_assignment,
    kron_word,
    product_coherent_state,
    random_3sat_instance,
    random_instance,
)

SYM3 = instances.build_symmetric_instance(3)


def test_clause_hp_is_table_diagonal():
    hp = operators.clause_hp(SYM3.clauses[0])
    assert np.array_equal(np.diag(hp), [0, 3, 3, 1, 3, 1, 1, 1])
    assert np.count_nonzero(hp - np.diag(np.diag(hp))) == 0
    ec = operators.clause_hp(instances.build_exact_cover_clause((0, 1, 2)))
    assert np.array_equal(np.diag(ec), [1, 0, 0, 1, 0, 1, 1, 1])
    zero = operators.clause_hp(instances.Clause((0, 1, 2), (0,) * 8))
    assert not zero.any()


def test_clause_hb_spectrum():
    hb = operators.clause_hb(SYM3.clauses[0])
    assert abs(np.trace(hb) - 12.0) < 1e-12
    w, v = np.linalg.eigh(hb)
    assert abs(w[0]) < 1e-12
    assert abs(w[-1] - 3.0) < 1e-12
    # integer ladder 0..3 with binomial degeneracies
    assert np.allclose(sorted(w), [0, 1, 1, 1, 2, 2, 2, 3], atol=1e-12)
    # ground vector: uniform with all equal signs in the z basis
    ground = v[:, 0]
    assert np.allclose(np.abs(ground), 1 / np.sqrt(8), atol=1e-12)
    assert np.allclose(ground / ground[0], np.ones(8), atol=1e-10)


def test_pauli_decompose_single_word():
    A = kron_word("xxx")
    coeffs = operators.pauli_decompose(A)
    assert abs(coeffs[1, 1, 1] - 1.0) < 1e-14
    coeffs[1, 1, 1] = 0.0
    assert np.abs(coeffs).max() < 1e-14


def test_pauli_decompose_zero_diagonal_kills_diagonal_words():
    rng = np.random.default_rng(3)
    A = operators.sample_matrix(rng, 3, "real-symmetric", 2.0)
    coeffs = operators.pauli_decompose(A)
    for letters in itertools.product((0, 3), repeat=3):
        assert abs(coeffs[letters]) < 1e-13


def test_pauli_decompose_demo_matrix():
    # independent oracle: trace against explicitly built words
    A = operators.xz_coupling_matrix()
    expected = {}
    for word in itertools.product("0xyz", repeat=3):
        w = "".join(word)
        expected[w] = np.trace(kron_word(w) @ A).real / 8.0
    nonzero = {w: c for w, c in expected.items() if abs(c) > 1e-13}
    assert nonzero == pytest.approx(
        {"xz0": -1.0, "x0z": -1.0, "zx0": -1.0, "0xz": -1.0, "z0x": -1.0, "0zx": -1.0}
    )
    coeffs = operators.pauli_decompose(A)
    letter_index = {"0": 0, "x": 1, "y": 2, "z": 3}
    for w, c in expected.items():
        idx = tuple(letter_index[ch] for ch in w)
        assert abs(coeffs[idx] - c) < 1e-13


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_pauli_reconstruction_roundtrip(seed):
    rng = np.random.default_rng(seed)
    A = operators.sample_matrix(rng, 3, "complex-hermitian", 1.5)
    coeffs = operators.pauli_decompose(A)
    assert np.abs(operators.pauli_reconstruct(coeffs) - A).max() < 1e-12


def test_pauli_decompose_rejects_non_hermitian():
    bad = np.zeros((8, 8))
    bad[0, 1] = 1.0
    with pytest.raises(InputError):
        operators.pauli_decompose(bad)


def test_negate_bits_involution_and_spectrum():
    rng = np.random.default_rng(11)
    A = operators.sample_matrix(rng, 3, "real-symmetric", 3.0)
    for mask in ((0, 0, 0), (1, 0, 1), (1, 1, 1)):
        B = operators.negate_bits(A, mask)
        assert np.array_equal(operators.negate_bits(B, mask), A)
        assert np.allclose(
            np.linalg.eigvalsh(B), np.linalg.eigvalsh(A), atol=1e-12
        )
        assert np.abs(np.diagonal(B)).max() == 0.0
    assert np.array_equal(operators.negate_bits(A, (0, 0, 0)), A)


def test_negate_bits_is_x_conjugation():
    rng = np.random.default_rng(12)
    A = operators.sample_matrix(rng, 3, "complex-hermitian", 1.0)
    X = kron_word("x0x")
    assert np.abs(operators.negate_bits(A, (1, 0, 1)) - X @ A @ X).max() < 1e-14


def test_sample_matrix_bounds_and_zero_diagonal():
    rng = np.random.default_rng(0)
    A = operators.sample_matrix(rng, 3, "real-symmetric", 3.0)
    assert np.abs(A - A.T).max() == 0.0
    assert np.abs(np.diagonal(A)).max() == 0.0
    assert np.abs(A).max() <= 3.0
    B = operators.sample_matrix(rng, 3, "complex-hermitian", 0.5)
    assert np.abs(B - B.conj().T).max() == 0.0
    assert np.abs(np.diagonal(B)).max() == 0.0
    assert np.abs(B.real).max() <= 0.5 and np.abs(B.imag).max() <= 0.5


def test_perturbation_p1_independent_per_clause():
    rng = np.random.default_rng(5)
    inst = random_instance(rng, n=6, max_clauses=4)
    cfg = operators.PerturbationConfig(proposal="P1", seed=8)
    mats = operators.sample_perturbation(inst, cfg)
    assert len(mats) == len(inst.clauses)
    if len(mats) > 1:
        assert not np.array_equal(mats[0], mats[1])


def test_perturbation_p2_shares_one_matrix():
    inst = instances.build_symmetric_instance(5)
    cfg = operators.PerturbationConfig(proposal="P2", seed=8)
    mats = operators.sample_perturbation(inst, cfg)
    assert all(m is mats[0] for m in mats)
    assert np.abs(np.diagonal(mats[0])).max() == 0.0


def test_perturbation_p2_requires_uniform_clauses():
    mixed = instances.Instance(
        4,
        (
            instances.build_3sat_clause((0, 1, 2), (0, 0, 0)),
            instances.build_exact_cover_clause((1, 2, 3)),
        ),
    )
    with pytest.raises(ConfigError):
        operators.sample_perturbation(
            mixed, operators.PerturbationConfig(proposal="P2", seed=1)
        )


def test_perturbation_p3_conjugates_base():
    rng = np.random.default_rng(2)
    inst = random_3sat_instance(rng, 5, 6)
    cfg = operators.PerturbationConfig(proposal="P3", seed=77)
    mats = operators.sample_perturbation(inst, cfg)
    base = None
    for clause, mat in zip(inst.clauses, mats):
        mask = clause_false_assignment(clause)
        candidate = operators.negate_bits(mat, mask)
        if base is None:
            base = candidate
        assert np.abs(candidate - base).max() < 1e-14


def test_perturbation_p3_requires_3sat():
    with pytest.raises(ConfigError):
        operators.sample_perturbation(
            instances.build_symmetric_instance(4),
            operators.PerturbationConfig(proposal="P3", seed=1),
        )


def test_perturbation_none():
    cfg = operators.PerturbationConfig(proposal="none")
    assert operators.sample_perturbation(SYM3, cfg) is None


def test_perturbation_config_validation():
    with pytest.raises(ConfigError):
        operators.PerturbationConfig(proposal="P9")
    with pytest.raises(ConfigError):
        operators.PerturbationConfig(kind="gaussian")


def test_apply_path_endpoints():
    inst = instances.build_symmetric_instance(4)
    path = operators.build_path(inst)
    dim = 16
    rng = np.random.default_rng(1)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    # s=1 on basis states: multiplication by the cost
    costs = instances.cost_vector(inst)
    for idx in (0, 5, 15):
        e = np.zeros(dim, dtype=complex)
        e[idx] = 1.0
        out = operators.apply_path(path, 1.0, e)
        assert abs(out[idx] - costs[idx]) < 1e-12
        out[idx] = 0.0
        assert np.abs(out).max() < 1e-12
    # s=0: pure beginning Hamiltonian
    hb, hp, he = operators.dense_parts(path)
    assert np.abs(operators.apply_path(path, 0.0, psi) - hb @ psi).max() < 1e-10
    assert he is None


def test_apply_path_linearity_and_hermiticity():
    rng = np.random.default_rng(3)
    inst = random_instance(rng, n=6, max_clauses=5)
    extra = [
        operators.sample_matrix(rng, 3, "complex-hermitian", 1.0)
        for _ in inst.clauses
    ]
    path = operators.build_path(inst, extra=extra)
    dim = 64
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    phi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    s = 0.37
    a, b = 0.7 - 0.2j, -1.1 + 0.5j
    lhs = operators.apply_path(path, s, a * psi + b * phi)
    rhs = a * operators.apply_path(path, s, psi) + b * operators.apply_path(
        path, s, phi
    )
    assert np.abs(lhs - rhs).max() < 1e-10
    # <phi|H psi> = conj(<psi|H phi>)
    left = np.vdot(phi, operators.apply_path(path, s, psi))
    right = np.vdot(psi, operators.apply_path(path, s, phi))
    assert abs(left - np.conj(right)) < 1e-10


def test_apply_path_extra_weight_at_midpoint():
    inst = instances.build_symmetric_instance(4)
    A = operators.xz_coupling_matrix()
    path = operators.build_path(inst, extra=[A] * len(inst.clauses))
    plain = operators.build_path(inst)
    rng = np.random.default_rng(4)
    psi = rng.normal(size=16).astype(complex)
    diff = operators.apply_path(path, 0.5, psi) - operators.apply_path(
        plain, 0.5, psi
    )
    hb, hp, he = operators.dense_parts(path)
    assert np.abs(diff - 0.25 * (he @ psi)).max() < 1e-10


def test_apply_path_dimension_mismatch():
    path = operators.build_path(SYM3)
    with pytest.raises(InputError):
        operators.apply_path(path, 0.5, np.ones(4))


def test_materialize_matches_apply():
    rng = np.random.default_rng(9)
    inst = random_instance(rng, n=5, max_clauses=4)
    extra = [operators.sample_matrix(rng, 3, "real-symmetric", 2.0) for _ in inst.clauses]
    path = operators.build_path(inst, extra=extra)
    M = operators.materialize_dense(path, 0.42)
    for _ in range(20):
        psi = rng.normal(size=32) + 1j * rng.normal(size=32)
        assert np.abs(M @ psi - operators.apply_path(path, 0.42, psi)).max() < 1e-12


def test_materialize_diagonal_at_end():
    path = operators.build_path(SYM3)
    M = operators.materialize_dense(path, 1.0)
    assert np.array_equal(np.diag(M), instances.cost_vector(SYM3))
    assert np.count_nonzero(M - np.diag(np.diag(M))) == 0


def test_materialize_real_without_extra():
    path = operators.build_path(instances.build_symmetric_instance(4))
    M = operators.materialize_dense(path, 0.3)
    assert M.dtype == np.float64
    assert np.abs(M - M.T).max() < 1e-12


def test_materialize_capacity():
    inst = instances.Instance(13, (instances.build_3sat_clause((0, 1, 2), (0, 0, 0)),))
    path = operators.build_path(inst)
    with pytest.raises(CapacityError):
        operators.materialize_dense(path, 0.5)


def test_endpoint_identity_exact():
    rng = np.random.default_rng(21)
    inst = random_instance(rng, n=5, max_clauses=4)
    extra = [operators.sample_matrix(rng, 3, "real-symmetric", 3.0) for _ in inst.clauses]
    path = operators.build_path(inst, extra=extra)
    hb, hp, he = operators.dense_parts(path)
    assert np.array_equal(operators.materialize_dense(path, 0.0), hb)
    assert np.array_equal(operators.materialize_dense(path, 1.0), hp)


def test_disjoint_clause_operators_commute():
    inst = instances.Instance(
        6,
        (
            instances.build_3sat_clause((0, 1, 2), (0, 1, 0)),
            instances.build_3sat_clause((3, 4, 5), (1, 1, 1)),
        ),
    )
    rng = np.random.default_rng(6)
    extra = [operators.sample_matrix(rng, 3, "real-symmetric", 2.0) for _ in range(2)]
    p0 = operators.build_path(
        instances.Instance(6, (inst.clauses[0],)), extra=[extra[0]]
    )
    p1 = operators.build_path(
        instances.Instance(6, (inst.clauses[1],)), extra=[extra[1]]
    )
    a = operators.materialize_dense(p0, 0.4)
    b = operators.materialize_dense(p1, 0.4)
    assert np.abs(a @ b - b @ a).max() < 1e-10


def test_p3_negation_is_global_x_conjugation():
    rng = np.random.default_rng(17)
    inst = random_3sat_instance(rng, 6, 8)
    gmask = (1, 0, 1, 1, 0, 0)
    A = operators.sample_matrix(rng, 3, "real-symmetric", 3.0)
    extra = [operators.negate_bits(A, clause_false_assignment(c)) for c in inst.clauses]
    path = operators.build_path(inst, extra=extra)

    from _helpers import negate_3sat_instance

    inst2 = negate_3sat_instance(inst, gmask)
    extra2 = [
        operators.negate_bits(A, clause_false_assignment(c)) for c in inst2.clauses
    ]
    path2 = operators.build_path(inst2, extra=extra2)
    # conjugation by X on the masked bits maps one path onto the other
    X = kron_word("".join("x" if m else "0" for m in gmask))
    for s in (0.0, 0.31, 0.77, 1.0):
        m1 = operators.materialize_dense(path, s)
        m2 = operators.materialize_dense(path2, s)
        assert np.abs(X @ m1 @ X - m2).max() < 1e-10


def test_custom_schedules():
    inst = instances.build_symmetric_instance(3)
    path = operators.build_path(
        inst, schedules=(lambda s: (1 - s) ** 2, lambda s: s**2, lambda s: 0.0)
    )
    hb, hp, he = operators.dense_parts(path)
    M = operators.materialize_dense(path, 0.5)
    assert np.abs(M - (0.25 * hb + 0.25 * hp)).max() < 1e-12


def test_matrix_file_roundtrip():
    rng = np.random.default_rng(30)
    A = operators.sample_matrix(rng, 3, "complex-hermitian", 3.0)
    text = operators.format_matrix(A)
    B = operators.parse_matrix(text)
    assert np.array_equal(A, B)
    # the demonstration coupling stays integer-exact and real
    C = operators.parse_matrix(operators.format_matrix(operators.xz_coupling_matrix()))
    assert C.dtype == np.float64
    assert np.array_equal(C, operators.xz_coupling_matrix())


def test_parse_matrix_errors():
    with pytest.raises(ParseError):
        operators.parse_matrix("1 2\n3\n")
    with pytest.raises(ParseError):
        operators.parse_matrix("a b\nc d\n")
    with pytest.raises(ParseError):
        operators.parse_matrix("")


def test_mixed_arity_instance():
    # clauses of different arity go through separate kernel groups
    inst = instances.Instance(
        5,
        (
            instances.Clause((1, 3), (0, 2, 2, 1)),
            instances.build_3sat_clause((0, 2, 4), (1, 0, 1)),
            instances.Clause((2,), (0, 3)),
        ),
    )
    path = operators.build_path(inst)
    assert len(path.groups) == 3
    M = operators.materialize_dense(path, 0.6)
    rng = np.random.default_rng(44)
    for _ in range(5):
        psi = rng.normal(size=32) + 1j * rng.normal(size=32)
        assert np.abs(M @ psi - operators.apply_path(path, 0.6, psi)).max() < 1e-12
    assert np.array_equal(
        np.diag(operators.materialize_dense(path, 1.0)), instances.cost_vector(inst)
    )
    w = np.linalg.eigvalsh(operators.materialize_dense(path, 0.0))
    assert abs(w[0]) < 1e-12  # transverse ground energy is always 0


def test_apply_path_beyond_dense_cap():
    # matrix-free action stays available where materialization is capped
    n = 14
    rng = np.random.default_rng(41)
    inst = random_instance(rng, n=n, max_clauses=4)
    path = operators.build_path(inst)
    costs = None
    for idx in rng.integers(0, 1 << n, size=4):
        e = np.zeros(1 << n, dtype=complex)
        e[idx] = 1.0
        out = operators.apply_path(path, 1.0, e)
        a = tuple((int(idx) >> (n - 1 - b)) & 1 for b in range(n))
        assert abs(out[idx] - instances.eval_cost(inst, a)) < 1e-12
        out[idx] = 0.0
        assert np.abs(out).max() < 1e-12
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    phi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    left = np.vdot(phi, operators.apply_path(path, 0.4, psi))
    right = np.vdot(psi, operators.apply_path(path, 0.4, phi))
    assert abs(left - np.conj(right)) < 1e-8 * np.linalg.norm(psi) * np.linalg.norm(phi)


def test_coherent_expectation_factorizes():
    # embedding convention check: a product state's expectation of an
    # embedded word is the product of single-bit moments
    n = 6
    theta, phi = 1.2, 0.4
    psi = product_coherent_state(n, theta, phi)
    inst = instances.Instance(n, (instances.build_3sat_clause((1, 3, 4), (0, 0, 0)),))
    A = kron_word("xzy")
    path = operators.build_path(
        inst, extra=[A], schedules=(lambda s: 0.0, lambda s: 0.0, lambda s: 1.0)
    )
    got = np.vdot(psi, operators.apply_path(path, 0.5, psi)).real
    mx = np.sin(theta) * np.cos(phi)
    my = np.sin(theta) * np.sin(phi)
    mz = np.cos(theta)
    assert abs(got - mx * mz * my) < 1e-12
