"""Build script for the optional libsodium-backed extension.

The package is fully functional without the extension (a pure-Python lane
is selected at import time); building it just makes the hot kernels fast.
Set TAPESTRY_SKIP_NATIVE=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("TAPESTRY_SKIP_NATIVE"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        native = Extension(
            "tapestry._native",
            sources=["src/tapestry/_native.pyx"],
            libraries=["sodium"],
        )
        native.optional = True  # fall back to the pure lane if the build fails
        ext_modules = cythonize([native], language_level="3")

setup(ext_modules=ext_modules)
