#!/usr/bin/env python3
from setuptools import setup, find_packages

setup(
    name="shilov_eq",
    version="0.1.0",
    description="Exact equidistribution computations for Shilov-finite metrics on projective space",
    packages=find_packages(exclude=["test", "test.*"]),
    install_requires=[
        d for d in open("requirements.txt").readlines() if not d.startswith("--")
    ],
    extras_require={"test": ["pytest", "hypothesis"]},
    entry_points={
        "console_scripts": [
            "shilov-eq = shilov_eq.cli:main",
        ]
    },
)
