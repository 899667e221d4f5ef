"""Build hook for the optional compiled span kernels.

The package works without the extension (biospan falls back to the pure
Python twin), so the Extension is marked optional and a missing Cython
toolchain is not fatal.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "piiprep._speedups",
                ["src/piiprep/_speedups.pyx"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
