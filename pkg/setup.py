import numpy
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "edgecluster._kernel",
                ["src/edgecluster/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython: install with the pure-Python kernel only.
    pass

setup(ext_modules=ext_modules)
