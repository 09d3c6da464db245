import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# No -ffast-math: the kernel relies on compensated (Kahan) summation,
# which fast-math reassociation would silently break.
extensions = [
    Extension(
        "leadlag._kernels",
        ["src/leadlag/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-march=native", "-funroll-loops"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
)
