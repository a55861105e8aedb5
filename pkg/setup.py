import numpy
from setuptools import Extension, setup

# The compiled ray-cast kernel is optional: without Cython (or a C compiler)
# the package falls back to the pure-NumPy implementation at import time.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "radardepth.scene._raycast",
                ["src/radardepth/scene/_raycast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
