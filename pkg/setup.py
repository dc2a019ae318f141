"""Build script: compiles the Cython raycast kernel when a toolchain is present.

The extension is optional. If Cython or a C compiler is missing the install
falls back to the pure-Python kernel (scaledsim._raycast_py) selected at
import time by scaledsim.raycast.
"""
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that degrades to the pure-Python kernel instead of failing."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, header trouble, ...
            print(f"warning: compiled raycast kernel skipped ({exc}); "
                  "using pure-Python fallback", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc}); "
                  "using pure-Python fallback", file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension
    # -ffp-contract=off keeps the C kernel bit-identical to the Python
    # fallback (no fused multiply-add reassociation).
    ext = Extension(
        "scaledsim._raycast_c",
        ["src/scaledsim/_raycast_c.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
