"""Build the optional Cython kernels.

If Cython or a C compiler is unavailable the package still installs and
falls back to the numpy implementation in ``shifteval._pykernels``.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    extensions = [
        Extension(
            "shifteval._kernels",
            ["src/shifteval/_kernels.pyx"],
            include_dirs=[np.get_include()],
            # no fast-math / FMA contraction: results must match the fallback bit for bit
            extra_compile_args=["-O3", "-ffp-contract=off"],
            optional=True,
        )
    ]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
