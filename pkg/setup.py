"""Build shim for the optional compiled kernels.

The package works without the extension (a pure-Python backend is selected
at import time); compiling is strongly recommended for simulation-scale runs.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "blockrelay.coding._gf256ext",
                ["src/blockrelay/coding/_gf256ext.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
