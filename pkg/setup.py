"""Build script: compiles the optional fast kernels.

The package works without the extension (a pure-Python backend is selected
at import time), so a failed compile only costs speed.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/aelforge/_core/_kernels.pyx"],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    import warnings

    warnings.warn(f"fast kernels not built ({exc}); using pure-Python backend")

setup(ext_modules=ext_modules)
