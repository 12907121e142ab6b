"""Build script for the optional Cython kernels.

Set RBFFACE_NO_EXT=1 to skip the extension entirely (pure-Python install),
or RBFFACE_OPENMP=0 to build it without OpenMP.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RBFFACE_NO_EXT", "0") != "1":
    from Cython.Build import cythonize

    if os.environ.get("RBFFACE_OPENMP", "1") == "1" and os.name == "posix":
        par_args = ["-fopenmp"]
    else:
        par_args = []

    extensions = [
        Extension(
            "rbfface._ckernels",
            ["src/rbfface/_ckernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"] + par_args,
            extra_link_args=par_args,
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
