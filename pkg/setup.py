"""Build the optional Cython kernel; the package falls back to numpy without it."""
import os
import sys

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RHEXPLORE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("Cython not available; building pure-Python package", file=sys.stderr)
    else:
        openmp = [] if sys.platform == "darwin" else ["-fopenmp"]
        ext_modules = cythonize(
            [
                Extension(
                    "rhexplore._ckernels",
                    ["src/rhexplore/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"] + openmp,
                    extra_link_args=openmp,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
