"""Build the optional compiled kernel extension.

The package is fully functional without the extension: seogen._kernels
falls back to a pure-Python/numpy implementation at import time. The
extension only accelerates the beam-scoring and LCS inner loops, so any
build failure here downgrades to the fallback instead of aborting the
install.
"""

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or Cython missing
            print(f"WARNING: skipping compiled kernels ({exc}); "
                  "pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: failed to build {ext.name} ({exc}); "
                  "pure-Python fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        ["src/seogen/_kernels/_speedups.pyx"],
        compiler_directives={"language_level": "3"},
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
