"""Build script: compiles the optional Cython projection kernel.

The package works without the compiled extension (a pure numpy fallback is
selected at import time), so any build failure here downgrades to a warning
instead of aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"skipping compiled kernels: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name}: {exc}")


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    exts = [
        Extension(
            "sdqp._condat",
            ["src/sdqp/_condat.pyx"],
            include_dirs=[numpy.get_include()],
        ),
        Extension(
            "sdqp._fgpm",
            ["src/sdqp/_fgpm.pyx"],
            include_dirs=[numpy.get_include()],
        ),
    ]
    return cythonize(exts, language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
