import os

from setuptools import setup

ext_modules = []
if os.environ.get("KOROVKIN_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "korovkin._kernels",
                    ["src/korovkin/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # numpy fallback in korovkin/_kernels_py.py is used instead
        ext_modules = []

setup(ext_modules=ext_modules)
