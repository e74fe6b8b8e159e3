import os

from setuptools import setup

ext_modules = []
if not os.environ.get("GUIDEDGREEDY_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/guidedgreedy/_kernels.pyx"],
            language_level=3,
        )
    except ImportError:
        # No Cython: install pure-Python only; the package falls back at import.
        ext_modules = []

setup(ext_modules=ext_modules)
