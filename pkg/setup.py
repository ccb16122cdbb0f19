"""Build script: compiles the optional fast kernels when Cython is available.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); set GROWTHLAB_NO_EXT=1 to skip compilation.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("GROWTHLAB_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "growthlab._fast",
                    ["src/growthlab/_fast.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
