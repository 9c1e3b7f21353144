"""Build script: compiles the optional speedup extension.

The package works without the extension (a pure numpy backend is selected at
import time), so any build failure here degrades to a pure install instead of
aborting.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "streamsubmod._speedups",
        ["src/streamsubmod/_speedups.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


class optional_build_ext(build_ext):
    """Skip the extension instead of failing the whole install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: building streamsubmod._speedups failed ({exc}); "
                  "falling back to the pure-Python backend", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} failed to compile ({exc}); "
                  "falling back to the pure-Python backend", file=sys.stderr)


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
