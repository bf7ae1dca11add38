"""Build the optional compiled kernels.

Without Cython or a C compiler the package still installs; ``czc.kernels``
then falls back to the pure-Python implementations.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("czc._ckernels", ["src/czc/_ckernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": 3},
        quiet=True,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
