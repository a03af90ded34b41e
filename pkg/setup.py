import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("MPA_BRIDGE_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "mpabridge._kernels",
            ["src/mpabridge/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3", "-ffp-contract=off"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize(
            [ext],
            language_level=3,
            compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
        )

setup(ext_modules=ext_modules)
