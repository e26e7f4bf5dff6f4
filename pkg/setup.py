"""Build script for the optional compiled training kernels.

The package works without the extension: sentry.hatespeech.kernels falls
back to the numpy implementation when the compiled module is absent.
Build in place with `python setup.py build_ext --inplace`.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "sentry.hatespeech._kernels_c",
                ["src/sentry/hatespeech/_kernels_c.pyx"],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
