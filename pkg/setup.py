import os

import numpy
from setuptools import Extension, setup

# RPC_NO_EXT=1 builds without the compiled core; the package then runs on its
# numpy/scipy fallback. RPC_PORTABLE=1 drops -march=native.
ext_modules = []
arch = [] if os.environ.get("RPC_PORTABLE") else ["-march=native"]
if not os.environ.get("RPC_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "rpcscreen._kernels",
                ["src/rpcscreen/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", *arch, "-fopenmp", "-Wno-unreachable-code"],
                extra_link_args=["-fopenmp"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
