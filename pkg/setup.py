"""Build hooks for the optional compiled kernel.

The package is pure Python and fully functional without the extension; the
Cython module in src/astower/_kernel.pyx is a drop-in accelerator for the
sparse-series inner loops.  Any failure while building it (no Cython, no C
compiler) downgrades the install to the pure backend instead of aborting.
Set ASTOWER_SKIP_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"skipping compiled kernel: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"skipping compiled kernel {ext.name}: {exc}")


ext_modules = []
if os.environ.get("ASTOWER_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/astower/_kernel.pyx"],
            language_level=3,
        )
    except Exception as exc:  # pragma: no cover - depends on toolchain
        print(f"Cython unavailable, building pure-Python only: {exc}")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
