"""Build script for the optional Cython inner-loop kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed extension build is tolerated.
"""

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/atlas_sensing/_ista_cy.pyx"],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
    include_dirs = [np.get_include()]
except Exception:  # pragma: no cover - cython/numpy missing at build time
    ext_modules = []
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
