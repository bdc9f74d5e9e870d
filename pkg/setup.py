"""Build hook for the optional compiled kernels.

If Cython or a C compiler is missing the package still installs; the numpy
fallback in ``qhdc.sim._pykernels`` is then used at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("QHDC_NO_EXTENSION", "") in ("", "0"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "qhdc.sim._ckernels",
                    ["src/qhdc/sim/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
