"""Build script: compiles the optional rank-statistics extension.

The package works without the extension; ``gridfact.rankstats`` falls back
to the pure-Python kernels when the compiled module is absent.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("gridfact._kernels", ["src/gridfact/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:
    # No Cython available: ship pure-Python kernels only.
    pass

setup(ext_modules=ext_modules)
