"""Large-n effective potential on the sphere and minimum tracking.

For the symmetric instance with a shared extra-term matrix, the scaled
coherent-state expectation of the path Hamiltonian converges to a
potential V(m, s) on the unit sphere, with m the direction of the
collective spin. The unperturbed part has the closed form

    2 (1-s) (1 - m_x) + (s/6) (13 + 3 m_z - 9 m_z^2 - 7 m_z^3)

and a shared 8x8 coupling A adds

    s (1-s) * (4/3) * sum over words of a_word m_a m_b m_c

where a_word are the Pauli coefficients of A and the identity letter
contributes a factor 1. The 4/3 is the limit of (2/n)^3 C(n,3); the
coherent-state expectation at finite n equals C(n,3) times the same
polynomial exactly, which the tests exploit as an oracle.

Everything here reduces to one cubic polynomial in m per path position,
which is what the tracking kernels consume. The tracked local minimum
starts at m = (1, 0, 0) and its endpoint classifies the run: the north
pole is the all-zeros ground state (success), the south pole the
all-ones local trap (failure).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, operators
from .errors import InputError

TRACK_DS = 1e-3
TRACK_TOL = 1e-10
TRACK_CONTINUITY_BOUND = 0.2
TRACK_MAX_ITER = 200
CLASSIFY_THRESHOLD = 0.999

MONOMIAL_EXPONENTS = np.array(_kernels._ref.MONOMIAL_EXPONENTS, dtype=np.int64)
N_MONOMIALS = len(MONOMIAL_EXPONENTS)

_MONO_INDEX = {
    (int(p), int(q), int(r)): k for k, (p, q, r) in enumerate(MONOMIAL_EXPONENTS)
}


def _base_monomials():
    """Monomial split of the unperturbed potential by schedule weight."""
    b = np.zeros(N_MONOMIALS)
    b[_MONO_INDEX[(0, 0, 0)]] = 2.0
    b[_MONO_INDEX[(1, 0, 0)]] = -2.0
    p = np.zeros(N_MONOMIALS)
    p[_MONO_INDEX[(0, 0, 0)]] = 13.0 / 6.0
    p[_MONO_INDEX[(0, 0, 1)]] = 0.5
    p[_MONO_INDEX[(0, 0, 2)]] = -1.5
    p[_MONO_INDEX[(0, 0, 3)]] = -7.0 / 6.0
    return b, p


BASE_BEGIN, BASE_FINAL = _base_monomials()


def sphere_point(theta, phi):
    """Unit vector for polar angle theta and azimuth phi (broadcasts)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack(
        np.broadcast_arrays(
            np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)
        ),
        axis=-1,
    )


def angles_of(m):
    """(theta, phi) of a unit vector."""
    m = np.asarray(m, dtype=float)
    return (
        np.arccos(np.clip(m[..., 2], -1.0, 1.0)),
        np.arctan2(m[..., 1], m[..., 0]),
    )


def base_potential(theta, phi, s):
    """Closed-form unperturbed potential (broadcasts over arrays)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    s = np.asarray(s, dtype=float)
    cz = np.cos(theta)
    out = 2.0 * (1.0 - s) * (1.0 - np.sin(theta) * np.cos(phi)) + (s / 6.0) * (
        13.0 + 3.0 * cz - 9.0 * cz**2 - 7.0 * cz**3
    )
    return out if out.ndim else float(out)


def extra_monomials(word_coeffs):
    """Fold a (4,4,4) Pauli coefficient table into sphere monomials.

    The identity letter contributes a factor 1, so each word lands on
    the monomial counting its x, y and z letters; the 4/3 prefactor is
    the clause-count scaling limit.
    """
    word_coeffs = np.asarray(word_coeffs)
    if word_coeffs.shape != (4, 4, 4):
        raise InputError(f"expected a (4,4,4) table, got {word_coeffs.shape}")
    e = np.zeros(N_MONOMIALS)
    for a in range(4):
        for b in range(4):
            for c in range(4):
                letters = (a, b, c)
                p = letters.count(1)
                q = letters.count(2)
                r = letters.count(3)
                e[_MONO_INDEX[(p, q, r)]] += (4.0 / 3.0) * word_coeffs[a, b, c]
    return e


def _poly_value(coeffs, m):
    m = np.asarray(m, dtype=float)
    powers = m[..., None, :] ** MONOMIAL_EXPONENTS  # (..., 20, 3)
    return powers.prod(axis=-1) @ coeffs


@dataclass(frozen=True)
class EffectivePotential:
    """Sphere potential split by schedule weight into monomial tables."""

    word_coeffs: np.ndarray  # (4,4,4) Pauli table of the coupling (zeros if none)
    mono_begin: np.ndarray  # weight (1-s)
    mono_final: np.ndarray  # weight s
    mono_extra: np.ndarray  # weight s(1-s)

    @classmethod
    def base_only(cls):
        """The unperturbed potential (no extra term)."""
        return cls(
            np.zeros((4, 4, 4)),
            BASE_BEGIN.copy(),
            BASE_FINAL.copy(),
            np.zeros(N_MONOMIALS),
        )

    @classmethod
    def from_matrix(cls, coupling):
        """Potential for a shared zero-diagonal Hermitian 8x8 coupling."""
        coupling = np.asarray(coupling)
        if coupling.shape != (8, 8):
            raise InputError(f"coupling must be 8x8, got {coupling.shape}")
        scale = max(1.0, float(np.abs(coupling).max()))
        if np.abs(np.diagonal(coupling)).max() > 1e-12 * scale:
            raise InputError(
                "coupling must have a zero diagonal; a diagonal part would "
                "modify the cost function itself"
            )
        words = operators.pauli_decompose(coupling)
        return cls(words, BASE_BEGIN.copy(), BASE_FINAL.copy(), extra_monomials(words))

    def coefficients_at(self, s):
        """Combined monomial coefficients at path position s."""
        return (
            (1.0 - s) * self.mono_begin
            + s * self.mono_final
            + s * (1.0 - s) * self.mono_extra
        )

    def value(self, m, s):
        """V(m, s); broadcasts over leading axes of m."""
        out = (
            (1.0 - s) * _poly_value(self.mono_begin, m)
            + s * _poly_value(self.mono_final, m)
            + s * (1.0 - s) * _poly_value(self.mono_extra, m)
        )
        return out if np.ndim(out) else float(out)

    def extra_value(self, m, s):
        """The s(1-s)-weighted extra part alone."""
        out = s * (1.0 - s) * _poly_value(self.mono_extra, m)
        return out if np.ndim(out) else float(out)

    def value_angles(self, theta, phi, s):
        """V on a (theta, phi, s) grid (broadcasts)."""
        theta, phi, s = np.broadcast_arrays(theta, phi, s)
        return self.value(sphere_point(theta, phi), np.asarray(s, dtype=float))

    def extra_value_angles(self, theta, phi, s):
        theta, phi, s = np.broadcast_arrays(theta, phi, s)
        m = sphere_point(theta, phi)
        out = np.asarray(s, dtype=float) * (1.0 - np.asarray(s, dtype=float)) * (
            _poly_value(self.mono_extra, m)
        )
        return out if out.ndim else float(out)

    def euclidean_gradient(self, m, s):
        c = self.coefficients_at(s)
        x, y, z = float(m[0]), float(m[1]), float(m[2])
        _, g, _ = _kernels._ref.eval_cubic(c, x, y, z)
        return np.array(g)

    def euclidean_hessian(self, m, s):
        c = self.coefficients_at(s)
        x, y, z = float(m[0]), float(m[1]), float(m[2])
        _, _, (hxx, hxy, hxz, hyy, hyz, hzz) = _kernels._ref.eval_cubic(c, x, y, z)
        return np.array([[hxx, hxy, hxz], [hxy, hyy, hyz], [hxz, hyz, hzz]])

    def tangent_gradient(self, m, s):
        """Euclidean gradient projected to the tangent plane at unit m."""
        m = np.asarray(m, dtype=float)
        g = self.euclidean_gradient(m, s)
        return g - (g @ m) * m

    def tangent_hessian(self, m, s):
        """2x2 Hessian of V restricted to the sphere, in tangent_basis(m)."""
        m = np.asarray(m, dtype=float)
        t1, t2 = tangent_basis(m)
        h = self.euclidean_hessian(m, s)
        gm = self.euclidean_gradient(m, s) @ m
        return np.array(
            [
                [t1 @ h @ t1 - gm, t1 @ h @ t2],
                [t2 @ h @ t1, t2 @ h @ t2 - gm],
            ]
        )


def tangent_basis(m):
    """Deterministic orthonormal tangent pair at unit m (matches kernels)."""
    m = np.asarray(m, dtype=float)
    t = _kernels._ref._tangent_basis(float(m[0]), float(m[1]), float(m[2]))
    return np.array(t[:3]), np.array(t[3:])


@dataclass(frozen=True)
class TrackResult:
    """Trajectory of the tracked local minimum over the s grid."""

    s_grid: np.ndarray
    points: np.ndarray  # (S, 3) unit vectors
    values: np.ndarray  # (S,)
    status: int  # TRACK_OK / TRACK_NO_CONVERGENCE / TRACK_DISCONTINUOUS
    first_bad_index: int

    @property
    def ok(self):
        return self.status == _kernels.TRACK_OK

    @property
    def endpoint(self):
        return self.points[-1]

    @property
    def classification(self):
        return classify(self)

    def diagnostic(self):
        if self.ok:
            return "clean"
        reason = (
            "no convergence"
            if self.status == _kernels.TRACK_NO_CONVERGENCE
            else "discontinuous jump"
        )
        return f"{reason} at s={self.s_grid[self.first_bad_index]:.6g}"


def track_minimum(
    potential,
    ds=TRACK_DS,
    tol=TRACK_TOL,
    continuity_bound=TRACK_CONTINUITY_BOUND,
    start=(1.0, 0.0, 0.0),
):
    """Continuously track a local minimum of V(m, s) from s=0 to 1.

    Each grid point warm-starts a projected-Newton minimization from the
    previous minimizer. The default start is the s=0 minimum m=(1,0,0).
    Non-convergence or a jump beyond the continuity bound marks the
    track (and its classification) indeterminate; tracking still runs to
    s=1 so the trajectory is complete.
    """
    if ds <= 0 or ds > 1:
        raise InputError("step ds must lie in (0, 1]")
    if tol <= 0:
        raise InputError("stationarity tolerance must be positive")
    n_steps = int(round(1.0 / ds))
    s_grid = np.linspace(0.0, 1.0, n_steps + 1)
    out_m = np.zeros((s_grid.size, 3))
    out_v = np.zeros(s_grid.size)
    start = np.asarray(start, dtype=float)
    if abs(np.linalg.norm(start) - 1.0) > 1e-9:
        raise InputError("start point must be a unit vector")
    status, bad = _kernels.track_cubic_sphere(
        np.ascontiguousarray(potential.mono_begin),
        np.ascontiguousarray(potential.mono_final),
        np.ascontiguousarray(potential.mono_extra),
        s_grid,
        start,
        tol,
        TRACK_MAX_ITER,
        continuity_bound,
        out_m,
        out_v,
    )
    return TrackResult(s_grid, out_m, out_v, int(status), int(bad))


def classify(track):
    """Endpoint label: success at the north pole, failure at the south,
    indeterminate otherwise or when the track itself was not clean."""
    if not track.ok:
        return "indeterminate"
    mz = float(track.endpoint[2])
    if mz >= CLASSIFY_THRESHOLD:
        return "success"
    if mz <= -CLASSIFY_THRESHOLD:
        return "failure"
    return "indeterminate"


def global_minimum(potential, s, resolution=48):
    """Coarse global minimum of V(., s): grid search plus local polish.

    Diagnostic helper; the tracked minimum is deliberately not required
    to stay global at intermediate s.
    """
    theta = np.linspace(0.0, np.pi, resolution)
    phi = np.linspace(-np.pi, np.pi, 2 * resolution, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    values = potential.value_angles(tt, pp, s)
    k = np.unravel_index(np.argmin(values), values.shape)
    m0 = sphere_point(tt[k], pp[k])
    c = np.ascontiguousarray(potential.coefficients_at(s))
    m, v, _ = _kernels._ref.minimize_cubic_sphere(
        c, tuple(m0), TRACK_TOL, TRACK_MAX_ITER
    )
    return np.array(m), v


@dataclass(frozen=True)
class MCResult:
    """Aggregate of repeated tracking runs with random couplings."""

    trials: int
    successes: int
    seed: int
    kind: str
    half_width: float
    classifications: tuple

    @property
    def fraction(self):
        return self.successes / self.trials


def mc_experiment(
    trials,
    seed,
    kind="real-symmetric",
    half_width=3.0,
    ds=TRACK_DS,
    tol=TRACK_TOL,
    continuity_bound=TRACK_CONTINUITY_BOUND,
):
    """Repeat: draw a coupling, track the minimum, classify the endpoint.

    Each trial derives its own generator from (seed, trial index), so
    results do not depend on execution order and rerunning with the same
    seed reproduces the classifications exactly.
    """
    if trials < 1:
        raise InputError("need at least one trial")
    labels = []
    successes = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        coupling = operators.sample_matrix(rng, 3, kind, half_width)
        pot = EffectivePotential.from_matrix(coupling)
        label = classify(track_minimum(pot, ds, tol, continuity_bound))
        labels.append(label)
        if label == "success":
            successes += 1
    return MCResult(trials, successes, seed, kind, half_width, tuple(labels))


def figure_curves(potential, s_values=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0), theta_points=501):
    """V(theta, phi, s) along the phi=0 and phi=pi meridians.

    Returns rows (s, theta, v_phi0, v_phi_pi), the plot-ready data for
    the potential snapshots.
    """
    theta = np.linspace(0.0, np.pi, theta_points)
    rows = []
    for s in s_values:
        v0 = potential.value_angles(theta, 0.0, s)
        vpi = potential.value_angles(theta, np.pi, s)
        for i in range(theta_points):
            rows.append((float(s), float(theta[i]), float(v0[i]), float(vpi[i])))
    return rows
