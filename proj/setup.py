import glob
import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup


def eigen_include():
    for path in ("/usr/include/eigen3", "/usr/local/include/eigen3"):
        if os.path.isdir(path):
            return path
    raise RuntimeError("Eigen3 headers not found")


ext = Pybind11Extension(
    "distrl._core",
    sorted(glob.glob("src/*.cpp")) + ["python/distrl/_core.cpp"],
    include_dirs=["include", "vendor", eigen_include()],
    cxx_std=20,
    extra_compile_args=["-O3"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
