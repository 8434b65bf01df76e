"""Build script for the compiled query kernels.

The extension is optional at runtime: lvlinker._kernels falls back to a
pure-Python implementation when the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

DIRECTIVES = {
    "language_level": "3",
    "boundscheck": False,
    "wraparound": False,
    "cdivision": True,
}

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "lvlinker._kernels._ext",
                ["src/lvlinker/_kernels/_ext.pyx"],
            )
        ],
        compiler_directives=DIRECTIVES,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
