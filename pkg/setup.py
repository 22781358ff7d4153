from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; _core falls back to _pykernels
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("dpskey._kernels", ["src/dpskey/_kernels.pyx"], optional=True)],
        language_level=3,
    )

setup(ext_modules=ext_modules)
