from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext = Extension(
        "spectral_poisson._kernels._core",
        ["src/spectral_poisson/_kernels/_core.pyx"],
        extra_compile_args=["-O3"],
    )
    # optional: a failed compile leaves the pure-Python kernels in charge
    ext.optional = True
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
