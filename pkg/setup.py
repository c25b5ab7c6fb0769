"""Build script: compiles the optional tape-evaluator extension.

The package works without the extension (a numpy fallback is selected at
import time), so any failure to cythonize or compile is downgraded to a
warning and a pure-Python install.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("phgkit._evalcore", sources=["src/phgkit/_evalcore.pyx"])],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"phgkit: skipping compiled evaluator ({exc!r}); "
                     "pure-Python backend will be used\n")

setup(ext_modules=ext_modules)
