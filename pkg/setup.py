from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # pure-Python fallback is selected at import when the extension is absent
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("feigel._kernels", ["src/feigel/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
