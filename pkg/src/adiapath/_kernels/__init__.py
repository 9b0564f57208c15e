"""Hot kernels with a compiled core and a pure Python fallback.

The package works identically with either backend. The compiled core is
two orders of magnitude faster on the sphere-tracking loop that
dominates the Monte Carlo experiment. For clause application the
fallback reduces to BLAS matrix products, which win for large state
vectors, so dispatch is by register size: the compiled gather/scatter
loop below the crossover, BLAS above it (see benchmarks/bench_kernels).

Set ADIAPATH_PURE_PYTHON=1 to force the fallback everywhere (used by
the benchmark and the parity tests).
"""

import os

from . import _ref

TRACK_OK = 0
TRACK_NO_CONVERGENCE = 1
TRACK_DISCONTINUOUS = 2

# measured crossover: the scalar kernel beats the BLAS path up to here
APPLY_COMPILED_MAX_BITS = 11

if os.environ.get("ADIAPATH_PURE_PYTHON") == "1":
    _core = None
else:
    try:
        from . import _core
    except ImportError:
        _core = None

BACKEND = "compiled" if _core is not None else "python"

if _core is None:
    track_cubic_sphere = _ref.track_cubic_sphere
    apply_clause_ops = _ref.apply_clause_ops
else:
    track_cubic_sphere = _core.track_cubic_sphere

    def apply_clause_ops(psi, n, positions, mats, out):
        # the compiled gather buffer holds registers up to 8 clause bits
        small = n <= APPLY_COMPILED_MAX_BITS and positions.shape[1] <= 8
        impl = _core if small else _ref
        return impl.apply_clause_ops(psi, n, positions, mats, out)
