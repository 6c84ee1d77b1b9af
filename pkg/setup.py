import os

import numpy
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("GEF_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "gef.numerics.cykernels",
                sources=["src/gef/numerics/cykernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
