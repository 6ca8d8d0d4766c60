from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "netscale._kernels",
                ["src/netscale/_kernels.pyx"],
                language="c++",
                extra_compile_args=["-O3", "-std=c++11"],
                optional=True,
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
else:
    # Pure-Python fallback kernels are used when the extension is absent.
    extensions = []

setup(ext_modules=extensions)
