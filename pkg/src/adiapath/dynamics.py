"""Time-dependent evolution along the path, H(t) = Hpath(t / T).

The default integrator splits [0, T] into equal intervals and applies
the exact propagator of the midpoint Hamiltonian on each, obtained from
its eigendecomposition. Every step is unitary, so the norm is conserved
to roundoff regardless of step count. A fixed-step rk4 integrator is
provided as an independent cross-check; it does not renormalize, and it
raises when the resulting norm drift exceeds the tolerance.

Success means projecting onto the ground space of the final
Hamiltonian; units have hbar = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectra
from .errors import AccuracyError, ConfigError, InputError


@dataclass(frozen=True)
class EvolutionSpec:
    """Run time, step count, integrator and optional initial state."""

    T: float
    steps: int = 1000
    method: str = "piecewise-eigen"
    initial_state: np.ndarray | None = None
    norm_tolerance: float = 1e-8
    sample_count: int = 0

    def __post_init__(self):
        if self.T < 0:
            raise ConfigError("run time must be nonnegative")
        if self.steps < 1:
            raise ConfigError("need at least one step")
        if self.method not in ("piecewise-eigen", "rk4"):
            raise ConfigError(f"unknown integrator {self.method!r}")


@dataclass(frozen=True)
class EvolutionResult:
    final_state: np.ndarray
    norm_drift: float
    success_probability: float
    samples: tuple = field(default_factory=tuple)  # (t, overlap_ground, norm)


def success_probability(psi, projector):
    """<psi|P|psi>, clamped into [0, 1] against roundoff."""
    p = float(np.real(np.vdot(psi, projector @ psi)))
    return min(max(p, 0.0), 1.0)


def required_time_estimate(min_gap, c=100.0):
    """Run-time scale c / gap^2; infinite when the gap closes."""
    if isinstance(min_gap, spectra.GapProfile):
        min_gap = min_gap.min_gap
    if min_gap < 0:
        raise InputError("gap must be nonnegative")
    if min_gap == 0.0:
        return math.inf
    return c / (min_gap * min_gap)


def _initial_state(hamiltonian_at, spec):
    if spec.initial_state is not None:
        psi = np.asarray(spec.initial_state, dtype=complex)
        if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
            raise InputError("initial state must be normalized")
        return psi
    eig = spectra.eigensystem(hamiltonian_at(0.0))
    return eig.vectors[:, 0].astype(complex)


def _ground_overlap(hamiltonian_at, s, psi):
    eig = spectra.eigensystem(hamiltonian_at(s))
    proj, _ = spectra.ground_projector(eig)
    return success_probability(psi, proj)


def _sample_times(spec):
    if spec.sample_count <= 0:
        return []
    if spec.sample_count == 1:
        return [spec.T]
    return list(np.linspace(0.0, spec.T, spec.sample_count))


def evolve(hamiltonian_at, spec):
    """Integrate i dpsi/dt = H(t/T) psi over [0, T].

    ``hamiltonian_at`` maps s in [0, 1] to a dense Hermitian matrix
    (full-space paths via materialize_dense, collective paths via
    collective_path).
    """
    psi = _initial_state(hamiltonian_at, spec)
    final_eig = spectra.eigensystem(hamiltonian_at(1.0))
    final_proj, _ = spectra.ground_projector(final_eig)

    sample_at = _sample_times(spec)
    samples = []
    if sample_at and sample_at[0] == 0.0:
        samples.append((0.0, _ground_overlap(hamiltonian_at, 0.0, psi), 1.0))
        sample_at = sample_at[1:]

    if spec.T > 0.0:
        dt = spec.T / spec.steps
        if spec.method == "piecewise-eigen":
            for k in range(spec.steps):
                s_mid = (k + 0.5) / spec.steps
                eig = spectra.eigensystem(hamiltonian_at(s_mid))
                phases = np.exp(-1j * eig.values * dt)
                psi = eig.vectors @ (phases * (eig.vectors.conj().T @ psi))
                t_now = (k + 1) * dt
                while sample_at and sample_at[0] <= t_now + 1e-12 * spec.T:
                    t_s = sample_at.pop(0)
                    samples.append(
                        (
                            t_s,
                            _ground_overlap(hamiltonian_at, t_now / spec.T, psi),
                            float(np.linalg.norm(psi)),
                        )
                    )
        else:  # rk4
            for k in range(spec.steps):
                t0 = k * dt
                h0 = np.asarray(hamiltonian_at(t0 / spec.T))
                h1 = np.asarray(hamiltonian_at((t0 + 0.5 * dt) / spec.T))
                h2 = np.asarray(hamiltonian_at((t0 + dt) / spec.T))
                k1 = -1j * (h0 @ psi)
                k2 = -1j * (h1 @ (psi + 0.5 * dt * k1))
                k3 = -1j * (h1 @ (psi + 0.5 * dt * k2))
                k4 = -1j * (h2 @ (psi + dt * k3))
                psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t_now = (k + 1) * dt
                while sample_at and sample_at[0] <= t_now + 1e-12 * spec.T:
                    t_s = sample_at.pop(0)
                    samples.append(
                        (
                            t_s,
                            _ground_overlap(hamiltonian_at, t_now / spec.T, psi),
                            float(np.linalg.norm(psi)),
                        )
                    )

    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    if drift > spec.norm_tolerance:
        raise AccuracyError(
            f"norm drift {drift:.3e} exceeds {spec.norm_tolerance:.1e}; "
            "increase the step count"
        )
    return EvolutionResult(
        final_state=psi,
        norm_drift=drift,
        success_probability=success_probability(psi, final_proj),
        samples=tuple(samples),
    )
