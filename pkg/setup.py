import os
from setuptools import setup, find_packages
from fnmatch import fnmatchcase

standard_exclude = ("*.pyc", "*~", ".*", "*.bak", "*.swp*", "test_*.py")
standard_exclude_directories = (".*", "./build", "./dist", "*.egg-info", "__pycache__")


def find_package_data(where=".", package="", exclude=standard_exclude, exclude_directories=standard_exclude_directories):
    out = {}
    stack = [(where, "", package)]
    while stack:
        where, prefix, package = stack.pop(0)
        for name in os.listdir(where):
            fn = os.path.join(where, name)
            if os.path.isdir(fn):
                if any(fnmatchcase(name, pattern) for pattern in exclude_directories):
                    continue
                stack.append((fn, prefix + name + "/", package))
            elif name.endswith(".py"):
                continue
            elif not any(fnmatchcase(name, pattern) for pattern in exclude):
                out.setdefault(package, []).append(prefix + name)
    return out


with open("README.md", encoding="utf-8") as readme:
    long_description = readme.read()

setup(
    name="lcpack",
    version="0.1.0",
    description="Two-dimensional knapsack and strip packing with L-shaped and container layouts",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="The MIT License (MIT)",
    packages=find_packages(),
    python_requires=">=3.8",
    install_requires=["PyYAML>=5.4", "numpy>=1.20", "pandas>=1.5", "svgwrite>=1.4"],
    extras_require={"test": ["hypothesis>=6.0"], "oracle": ["ortools>=9.4"]},
    entry_points={"console_scripts": ["lcpack = lcpack.cli:main"]},
    zip_safe=False,
    package_data=find_package_data(where="lcpack/", package="lcpack"),
)
