"""Build script for the optional C solver kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so any build failure here is downgraded to a
warning rather than aborting the install.
"""

import warnings

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "parcs._kernels._admm_c",
                sources=["src/parcs/_kernels/_admm_c.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"C kernel not built ({exc}); using the pure-Python fallback")
    extensions = []

setup(ext_modules=extensions)
