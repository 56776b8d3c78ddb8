import numpy as np
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "treelab._kernels._core",
                ["src/treelab/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-time only
    print(f"warning: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
