#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os
import fnmatch
from setuptools import setup, find_packages


# Path to the directory that contains this setup.py file.
base_dir = os.path.abspath(os.path.dirname(__file__))


def find_files(directory, pattern="*"):
    matches = []
    for root, dirnames, filenames in os.walk(directory):
        for filename in fnmatch.filter(filenames, pattern):
            matches.append(os.path.join(root, filename))
    return matches


setup(
    name="foodgap",
    description=(
        "Stationary equilibria of an incomplete-markets economy with subsistence food demand: "
        "distributional welfare effects of climate damages to agricultural productivity"
    ),
    long_description=open(os.path.join(base_dir, "README.md")).read(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["test", "test.*"]),
    scripts=[
        "scripts/foodgap.py",
    ],
    package_data={"foodgap": ["data/*"]},
    data_files=[("", ["README.md"]), ("scripts", find_files("scripts", "*.py"))],
    include_package_data=True,
    zip_safe=False,
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.8",
        "pandas>=1.5",
        "matplotlib>=3.5",
        "quantecon>=0.7",
        "statsmodels>=0.13",
    ],
    extras_require={"test": ["pytest", "hypothesis"]},
    python_requires=">=3.8",
)
