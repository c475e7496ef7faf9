"""Build script: compiles the optional eigensolver kernel.

The package is fully functional without the compiled extension; the
pure-Python backend is selected automatically at import when the build
is unavailable.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Swallow extension build failures and fall back to pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: compiled kernel skipped ({exc});"
                  " using pure-Python eigensolver", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc});"
                  " using pure-Python eigensolver", file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "l2approx._eigh_kernel",
        ["src/l2approx/_eigh_kernel.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


def legacy_metadata():
    """Metadata fallback for setuptools < 61, which ignores [project]."""
    import setuptools
    major = int(setuptools.__version__.split(".")[0])
    if major >= 61:
        return {}
    return {
        "name": "l2approx",
        "version": "0.1.0",
        "package_dir": {"": "src"},
        "packages": ["l2approx"],
        "install_requires": ["numpy", "mpmath"],
        "python_requires": ">=3.10",
        "entry_points": {"console_scripts": ["l2approx = l2approx.cli:main"]},
    }


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext},
      **legacy_metadata())
