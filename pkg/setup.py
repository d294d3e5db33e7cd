"""Build the optional compiled kernels.

Without Cython or a C compiler the package installs with only the numpy
fallback; ``rtnsim._backend`` picks whichever is importable.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("RTNSIM_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("rtnsim._kernels", ["src/rtnsim/_kernels.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
