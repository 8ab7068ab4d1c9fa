from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the compiled kernel must match the pure-Python
# classification bit for bit, and fused multiply-adds would break that.
ext = Extension(
    "fastescape._speedups",
    ["src/fastescape/_speedups.pyx"],
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
