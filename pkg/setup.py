"""Build script: compiles the optional reachability kernel extension.

The package works without the extension (a pure-Python kernel with the same
interface is selected at import time), so any failure to cythonize or compile
falls back to a pure-Python install instead of breaking it.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "parley.cpn._kernel_c",
            ["src/parley/cpn/_kernel_c.pyx"],
        )
    ]
    ext_modules = cythonize(
        extensions, compiler_directives={"language_level": "3"}
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
