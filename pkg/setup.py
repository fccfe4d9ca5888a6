"""Builds the optional Cython kernels; the package works without them."""

import os

from setuptools import Extension, setup


def build_ext_modules():
    if os.environ.get("TOYLOCAL_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "toylocal._ckernels",
        [os.path.join("src", "toylocal", "_ckernels.pyx")],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=build_ext_modules())
