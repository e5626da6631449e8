"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure here degrades to a pure build
instead of aborting the install.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "susyosc._kernels._core",
                ["src/susyosc/_kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - environment dependent
    print(f"susyosc: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
