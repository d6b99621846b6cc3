"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-numpy backend is selected
at import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup

import numpy as np
from Cython.Build import cythonize

extensions = [
    Extension(
        "vrjp._kernels._compiled",
        ["src/vrjp/_kernels/_compiled.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
