"""Build script for the compiled simulation kernel.

The Cython extension is optional: set RECURKIT_NO_EXT=1 to install without a
compiler.  The package falls back to the pure-Python kernel at import time
when the extension is missing.
"""
import os

import numpy
from setuptools import setup

ext_modules = []
if os.environ.get("RECURKIT_NO_EXT", "0") != "1":
    from Cython.Build import cythonize
    from setuptools import Extension

    npyrandom_dir = os.path.join(
        os.path.dirname(numpy.random.__file__), "lib")

    ext_modules = cythonize(
        [
            Extension(
                "recurkit.simulate._kernel",
                ["src/recurkit/simulate/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                library_dirs=[npyrandom_dir],
                libraries=["npyrandom"],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
