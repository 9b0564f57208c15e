"""Numerical laboratory for adiabatic interpolation paths.

The path from a transverse beginning Hamiltonian to a diagonal problem
Hamiltonian carries an optional randomly generated extra term switched
on mid-path. The package builds such paths for clause-based cost
functions, diagonalizes them, evolves states along them, and analyzes
the large-n limit through an effective potential on the sphere.
"""

from . import collective, dynamics, effpot, instances, operators, spectra
from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = [
    "collective",
    "dynamics",
    "effpot",
    "instances",
    "operators",
    "spectra",
    "kernel_backend",
    "__version__",
]
