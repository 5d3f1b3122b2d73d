"""Build script: compiles the optional Cython speedups extension.

The package works without the extension (a pure-Python kernel is selected at
import time), but the compiled core is ~2 orders of magnitude faster on the
hot paths (insertion analysis and schedule LP), which matters for large
multi-start runs.
"""

import os

from setuptools import setup

ext_modules = []
try:
    if not os.path.exists("src/pdse/_speedups.pyx"):
        raise ImportError
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/pdse/_speedups.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
