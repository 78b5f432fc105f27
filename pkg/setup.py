"""Build the compiled plant-stepping kernel.

The extension is optional: if Cython or a C compiler is unavailable the
package falls back to the pure-Python kernel at import time.  The kernel
must stay bit-identical to the fallback, so FP contraction is disabled.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "chilsim._stepcore",
                ["src/chilsim/_stepcore.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
