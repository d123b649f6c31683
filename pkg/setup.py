"""Builds the optional compiled kernels.

The package is pure Python by default; if Cython and a C compiler are
available, the hot loops (tree traversal, edge aggregation, betweenness)
are compiled.  A failed extension build is not fatal - the Python
fallback in dpg._kernels_py is selected at import time.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "dpg._speedups",
                sources=["src/dpg/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
