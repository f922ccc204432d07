import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "elasticast._ckernels",
        ["src/elasticast/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        # keep IEEE semantics so results track the NumPy fallback
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
