from setuptools import Extension, setup

# The compiled trial-loop kernel is optional: the package falls back to the
# vectorized numpy backend when the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mimolink._kernels._cy_backend",
                ["src/mimolink/_kernels/_cy_backend.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
