"""Build script: compiles the optional fast kernels.

The extension is best effort. If Cython or a C compiler is missing the
package installs anyway and falls back to the pure NumPy kernels at
import time. Set ADIAPATH_NO_EXTENSION=1 to skip the build explicitly.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ADIAPATH_NO_EXTENSION") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "adiapath._kernels._core",
                    ["src/adiapath/_kernels/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
