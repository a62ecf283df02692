import os

from setuptools import setup

ext_modules = []
if os.environ.get("EOMQ_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "eomq._ckernels",
                    ["src/eomq/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                    # a failed compile falls back to the pure-Python kernels
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
