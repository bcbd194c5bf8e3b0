import os

from setuptools import Extension, setup

# The compiled kernels are optional: without Cython (or with
# NABLA_OPS_NO_EXT=1) the package installs with the pure-Python fallback.
ext_modules = []
if os.environ.get("NABLA_OPS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("nablaops._kernels", ["src/nablaops/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
