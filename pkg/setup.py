"""Build hook for the optional compiled kernel.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes embedding and similarity scans faster.
Run `python setup.py build_ext --inplace` after an editable install to get
the compiled backend.
"""

from setuptools import setup

extensions = []
try:
    from setuptools import Extension
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "activitykg.kernels._core",
                ["src/activitykg/kernels/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython available: install pure-Python only.
    pass

setup(ext_modules=extensions)
