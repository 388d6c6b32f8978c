"""Builds the optional compiled kernel extension.

The package works without it (a pure numpy fallback is selected at import
time), but the compiled kernels make forest training and Shapley
explanations roughly an order of magnitude faster.  Set EQUARENT_NO_EXT=1
to skip compilation.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("EQUARENT_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "equarent._kernels._ctree",
                    ["src/equarent/_kernels/_ctree.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # FMA contraction would break bit-identity with the
                    # pure numpy backend.
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
