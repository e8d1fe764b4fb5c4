"""Build script for the optional compiled batch-kernel extension.

Set SERIALT_PURE=1 to skip compilation and install the pure-Python
package; serialt.backend falls back to the numpy kernels at import.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SERIALT_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("serialt._batch_c", ["src/serialt/_batch_c.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
