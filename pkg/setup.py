import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("WMSCAN_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("wmscan._kernel", ["src/wmscan/_kernel.pyx"], extra_compile_args=["-O3"])],
            language_level=3,
        )

setup(ext_modules=ext_modules)
