"""Build script: compiles the optional Cython sweep kernel.

The compiled extension is a pure speed-up; the package falls back to the
NumPy implementation when it is missing. Set COXMIC_NO_EXT=1 to skip the
extension entirely (e.g. on systems without a C compiler).
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


def make_extensions():
    if os.environ.get("COXMIC_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "coxmic._sweep_cy",
        ["src/coxmic/_sweep_cy.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


class OptionalBuildExt(build_ext):
    """Swallow compiler failures; the package still works without the ext."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: extension build failed ({exc}); "
                  "falling back to the NumPy kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: building {ext.name} failed ({exc}); "
                  "falling back to the NumPy kernel")


setup(ext_modules=make_extensions(), cmdclass={"build_ext": OptionalBuildExt})
