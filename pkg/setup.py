"""Build the compiled simulation kernel.

The extension is optional: if Cython or a C toolchain is unavailable the
package falls back to the pure-Python engine at import time.
-ffp-contract=off keeps the compiled kernel's arithmetic bit-identical to
the Python fallback (no fused multiply-add contraction).
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "phylosim._kernel",
                ["src/phylosim/_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
