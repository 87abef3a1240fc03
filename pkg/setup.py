"""Build script for the optional compiled signal kernels.

The extension is marked optional: if no compiler (or Cython) is available the
install still succeeds and the package falls back to the pure-NumPy kernels at
import time.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cvqan._kernels._fast",
                ["src/cvqan/_kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
