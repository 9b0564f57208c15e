"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines live.
"""

import time
from math import comb

import numpy as np
import pytest

from adiapath import (
    collective,
    dynamics,
    effpot,
    instances,
    operators,
    spectra,
)

from _helpers import (
    clause_false_assignment,
    negate_3sat_instance,
    random_3sat_instance,
    random_instance,
)


def _report(num, name, ok, detail):
    verdict = "PASS" if ok else "FAIL"
    print(f"criterion {num:2d} [{verdict}] {name}: {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_01_extra_potential_exactness():
    start = time.perf_counter()
    pot = effpot.EffectivePotential.from_matrix(operators.xz_coupling_matrix())
    theta = np.linspace(0.0, np.pi, 50)[:, None, None]
    phi = np.linspace(-np.pi, np.pi, 50)[None, :, None]
    s = np.linspace(0.0, 1.0, 21)[None, None, :]
    got = pot.extra_value_angles(theta, phi, s)
    want = -8.0 * s * (1.0 - s) * np.sin(theta) * np.cos(theta) * np.cos(phi)
    err = float(np.abs(got - want).max())
    elapsed = time.perf_counter() - start
    _report(
        1,
        "extra potential matches the closed form on a 50x50x21 grid",
        err <= 1e-10 and elapsed < 1.0,
        f"max err {err:.2e}, {elapsed:.2f}s",
    )


def test_criterion_02_base_potential_convergence():
    start = time.perf_counter()
    thetas = np.linspace(0.0, np.pi, 41)
    svals = np.linspace(0.0, 1.0, 21)
    max_dev = {}
    for n in (200, 400):
        hb = collective.hb_collective(n).matrix
        hp = collective.hp_collective(n).matrix
        scale = (2.0 / n) ** 3
        dev = 0.0
        for theta in thetas:
            st = collective.coherent_state(n, theta, 0.0)
            eb, ep = st.expectation(hb), st.expectation(hp)
            for s in svals:
                v_n = scale * ((1 - s) * eb + s * ep)
                dev = max(dev, abs(v_n - effpot.base_potential(theta, 0.0, s)))
        max_dev[n] = dev
    elapsed = time.perf_counter() - start
    _report(
        2,
        "scaled coherent expectation converges to the closed-form potential",
        max_dev[200] <= 0.1 and max_dev[400] < max_dev[200] and elapsed < 10.0,
        f"dev(200)={max_dev[200]:.4f}, dev(400)={max_dev[400]:.4f}, {elapsed:.2f}s",
    )


def test_criterion_03_unperturbed_tracking_fails():
    start = time.perf_counter()
    track = effpot.track_minimum(effpot.EffectivePotential.base_only())
    theta_end, _ = effpot.angles_of(track.endpoint)
    theta_start, _ = effpot.angles_of(track.points[0])
    elapsed = time.perf_counter() - start
    ok = (
        abs(theta_start - np.pi / 2) < 1e-9
        and abs(theta_end - np.pi) <= np.deg2rad(2.6)
        and track.classification == "failure"
        and elapsed < 1.0
    )
    _report(
        3,
        "without the extra term the tracked minimum ends at the south pole",
        ok,
        f"theta(1)={np.rad2deg(theta_end):.2f} deg, "
        f"{track.classification}, {elapsed:.2f}s",
    )


def test_criterion_04_demo_coupling_tracking_succeeds():
    start = time.perf_counter()
    pot = effpot.EffectivePotential.from_matrix(operators.xz_coupling_matrix())
    track = effpot.track_minimum(pot)
    theta_end, _ = effpot.angles_of(track.endpoint)
    elapsed = time.perf_counter() - start
    ok = (
        theta_end <= np.deg2rad(2.6)
        and track.classification == "success"
        and elapsed < 1.0
    )
    _report(
        4,
        "with the x-z coupling the tracked minimum ends at the north pole",
        ok,
        f"theta(1)={np.rad2deg(theta_end):.2f} deg, "
        f"{track.classification}, {elapsed:.2f}s",
    )


def test_criterion_05_monte_carlo_success_fraction():
    start = time.perf_counter()
    result = effpot.mc_experiment(1000, seed=20240801)
    elapsed = time.perf_counter() - start
    ok = 0.30 <= result.fraction <= 0.40 and elapsed < 60.0
    _report(
        5,
        "1000 random couplings: success fraction in [0.30, 0.40]",
        ok,
        f"{result.successes}/1000 = {result.fraction:.3f}, {elapsed:.1f}s",
    )


def test_criterion_06_problem_hamiltonian_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(606)
    worst_deficit = 0.0
    for _ in range(20):
        inst = random_instance(rng, n=int(rng.integers(3, 11)), max_clauses=6)
        path = operators.build_path(inst)
        hp = operators.materialize_dense(path, 1.0)
        if not np.array_equal(np.diag(hp), instances.cost_vector(inst)):
            _report(6, "problem Hamiltonian diagonal equals brute-force costs",
                    False, f"mismatch for n={inst.n}")
        eig = spectra.eigensystem(operators.materialize_dense(path, 0.0))
        proj, _ = spectra.ground_projector(eig)
        uniform = np.full(path.dim, path.dim**-0.5, dtype=complex)
        deficit = 1.0 - dynamics.success_probability(uniform, proj)
        worst_deficit = max(worst_deficit, deficit)
    elapsed = time.perf_counter() - start
    _report(
        6,
        "problem diagonal exact and uniform state spans the s=0 ground space",
        worst_deficit <= 1e-8,
        f"20 instances, worst overlap deficit {worst_deficit:.2e}, {elapsed:.1f}s",
    )


def test_criterion_07_negation_invariance():
    start = time.perf_counter()
    rng = np.random.default_rng(707)
    n = 9
    worst = 0.0
    for _ in range(10):
        inst = random_3sat_instance(rng, n, 3 * n)
        gmask = tuple(int(v) for v in rng.integers(0, 2, size=n))
        base = operators.sample_matrix(rng, 3, "real-symmetric", 3.0)
        extras = [
            operators.negate_bits(base, clause_false_assignment(c))
            for c in inst.clauses
        ]
        negated = negate_3sat_instance(inst, gmask)
        extras_neg = [
            operators.negate_bits(base, clause_false_assignment(c))
            for c in negated.clauses
        ]
        p1 = operators.build_path(inst, extra=extras)
        p2 = operators.build_path(negated, extra=extras_neg)
        for s in np.linspace(0.1, 0.9, 9):
            w1 = np.linalg.eigvalsh(operators.materialize_dense(p1, s))
            w2 = np.linalg.eigvalsh(operators.materialize_dense(p2, s))
            worst = max(worst, float(np.abs(w1 - w2).max()))
    elapsed = time.perf_counter() - start
    _report(
        7,
        "bit-negated 3-SAT instances share spectra under the conjugated coupling",
        worst <= 1e-9,
        f"10 instances, worst spectral diff {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_08_adiabatic_run_time_contract():
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    inst = random_3sat_instance(rng, 6, 18, satisfiable=True)
    path = operators.build_path(inst)
    ham = operators.dense_path(path)
    profile = spectra.gap_scan(ham, np.linspace(0.0, 1.0, 201))
    _, gap = spectra.min_gap_refine(ham, profile)
    T = dynamics.required_time_estimate(gap, c=100.0)
    steps = max(4000, int(20 * T))
    result = dynamics.evolve(ham, dynamics.EvolutionSpec(T=T, steps=steps))
    elapsed = time.perf_counter() - start
    ok = result.success_probability >= 0.99 and result.norm_drift <= 1e-8
    _report(
        8,
        "success probability at T = 100/gap^2 on a satisfiable 6-bit instance",
        ok,
        f"gap={gap:.4f}, T={T:.0f}, p={result.success_probability:.5f}, "
        f"drift={result.norm_drift:.1e}, {elapsed:.1f}s",
    )


def test_criterion_09_collective_gap_trend():
    start = time.perf_counter()
    grid = np.linspace(0.0, 1.0, 201)
    plain = {
        n: spectra.gap_scan(collective.collective_path(n, scaled=True), grid).min_gap
        for n in (50, 100, 200)
    }
    with_extra = spectra.gap_scan(
        collective.collective_path(200, include_extra=True, scaled=True), grid
    ).min_gap
    elapsed = time.perf_counter() - start
    ok = plain[50] > plain[100] > plain[200] and with_extra > plain[200]
    _report(
        9,
        "collective minimum gap shrinks with n and the extra term lifts it",
        ok,
        f"plain {plain[50]:.2e} > {plain[100]:.2e} > {plain[200]:.2e}; "
        f"with extra at n=200: {with_extra:.2e}, {elapsed:.1f}s",
    )


def test_criterion_10_gradient_checks():
    start = time.perf_counter()
    rng = np.random.default_rng(1010)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        coupling = operators.sample_matrix(
            rng, 3, rng.choice(["real-symmetric", "complex-hermitian"]), 3.0
        )
        pot = effpot.EffectivePotential.from_matrix(coupling)
        m = rng.normal(size=3)
        m /= np.linalg.norm(m)
        s = rng.uniform(0.0, 1.0)
        t1, t2 = effpot.tangent_basis(m)
        grad = pot.tangent_gradient(m, s)
        analytic = np.array([grad @ t1, grad @ t2])
        fd = []
        for t in (t1, t2):
            vp = pot.value((m + h * t) / np.linalg.norm(m + h * t), s)
            vm = pot.value((m - h * t) / np.linalg.norm(m - h * t), s)
            fd.append((vp - vm) / (2.0 * h))
        rel = np.abs(analytic - np.array(fd)).max() / max(1.0, np.abs(analytic).max())
        worst = max(worst, float(rel))
    elapsed = time.perf_counter() - start
    _report(
        10,
        "tangent gradients match central finite differences at 100 samples",
        worst <= 1e-6,
        f"worst relative error {worst:.2e}, {elapsed:.1f}s",
    )
