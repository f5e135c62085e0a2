import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kernels fall back to numpy
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("NODAL_LAB_NO_EXT") != "1":
    ext_modules = cythonize(
        [
            Extension(
                "nodal_lab._ckernels",
                ["src/nodal_lab/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
