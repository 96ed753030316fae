from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fall back to the pure-Python kernels
    cythonize = None

extensions = [
    Extension(
        "varlp._kernels",
        ["src/varlp/_kernels.pyx"],
        # no -ffast-math: the kernels must stay bit-identical to the Python twin
        extra_compile_args=["-O3"],
        optional=True,
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"})
    if cythonize is not None
    else [],
)
