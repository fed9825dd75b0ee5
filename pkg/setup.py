"""Builds the optional compiled kernel core.

The package works without it (a pure-Python backend is selected at import
time), but the compiled core is roughly two orders of magnitude faster on
the per-epoch gradient kernels. Build in place with:

    python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup

PYX = "src/steergrad/_kernels/_core_c.pyx"

ext_modules = []
try:
    if not os.path.exists(PYX):
        raise ImportError
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "steergrad._kernels._core_c",
                [PYX],
                include_dirs=[numpy.get_include()],
                # No -ffast-math / -march=native: the compiled backend must
                # produce bit-identical results to the pure-Python one.
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass  # no Cython/numpy at build time: install pure-Python only

setup(ext_modules=ext_modules)
