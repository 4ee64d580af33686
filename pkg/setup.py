"""Build script for the optional compiled trajectory kernel.

The package is fully functional without the extension (a vectorized
numpy fallback is selected at import time), so a failed compilation
downgrades to a pure-Python install instead of aborting.
"""

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "rtnqubit._mc_kernel",
        ["src/rtnqubit/_mc_kernel.pyx"],
        include_dirs=[np.get_include()],
    )
    return cythonize([ext], language_level="3")


# metadata duplicated from pyproject.toml so that toolchains too old to
# read [project] tables (e.g. the setuptools bundled with a bare venv)
# still build the extension into the right place
_KWARGS = dict(
    name="rtnqubit",
    version="0.1.0",
    package_dir={"": "src"},
    packages=["rtnqubit"],
    entry_points={"console_scripts": ["rtnqubit=rtnqubit.cli:main"]},
)

try:
    setup(ext_modules=_extensions(), **_KWARGS)
except SystemExit:
    raise
except Exception:
    setup(ext_modules=[], **_KWARGS)
