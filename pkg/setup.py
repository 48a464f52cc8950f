from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "symdyn._jacobi",
                ["src/symdyn/_jacobi.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython available: install pure Python only; the package selects
    # the reference kernel at import time.
    pass

setup(ext_modules=ext_modules)
