"""Build script: compiles the Cython hot-loop kernels when Cython is available.

The package works without the extension (a pure-Python kernel module is
selected at import time), so a failed/absent Cython build degrades to the
slow path instead of breaking the install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/alvlab/_kernels/_cy.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
