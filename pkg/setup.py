"""Build script: compiles the optional Cython fast core.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so a failed compile only costs speed.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("LAMPERTI_LAB_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "lamperti_lab.backend._fastcore",
                    ["src/lamperti_lab/backend/_fastcore.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build-env dependent
        print(f"lamperti-lab: skipping fast core build ({exc!r}); "
              "the NumPy fallback will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
