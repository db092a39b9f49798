"""Build script: compiles the hot simulation kernel as a C extension.

Set HAMMERSIM_PURE=1 to skip compilation; the package then falls back to
the pure-Python kernel at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HAMMERSIM_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "hammersim._speed",
                    ["src/hammersim/_speed.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
