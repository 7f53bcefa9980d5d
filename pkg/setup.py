from setuptools import Extension, setup
from Cython.Build import cythonize
import numpy as np

# -ffp-contract=off: the pure-Python fallback must reproduce the compiled
# kernels bit for bit, so FMA contraction has to stay disabled.
ext = Extension(
    "cmjlab._kernels",
    ["src/cmjlab/_kernels.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
