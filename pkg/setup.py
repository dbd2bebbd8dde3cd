from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "polypass._kernels",
                ["src/polypass/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
else:
    # Pure-Python install; polypass.backend falls back to the numpy kernels.
    ext_modules = []

setup(ext_modules=ext_modules)
