"""Minimal setup.py: builds the Cython path-solver kernel.

All metadata lives in pyproject.toml.  If Cython or a C compiler is
unavailable the extension is skipped and the package falls back to the
pure-numpy kernel at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "themepath._pathcore",
                ["src/themepath/_pathcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
