import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kimpl.kernels falls back
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("kimpl.kernels._ckernels",
                   sources=["src/kimpl/kernels/_ckernels.pyx"],
                   include_dirs=[np.get_include()])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
