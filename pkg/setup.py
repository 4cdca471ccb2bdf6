#!/usr/bin/env python
from setuptools import setup

install_requires = [
    "Django>=3.2",
    "numpy>=1.20",
    "scipy>=1.6",
    "scikit-learn>=1.0",
]

tests_require = ["coverage"]

setup(
    name="django-cogsense",
    use_scm_version=True,
    description="Cooperative spectrum sensing simulation for Django.",
    author="The cogsense developers",
    long_description=open("README.rst", "r").read(),
    packages=[
        "cogsense",
        "cogsense.fusion",
        "cogsense.management",
        "cogsense.management.commands",
        "cogsense.utils",
    ],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Framework :: Django",
        "Framework :: Django :: 3.2",
        "Framework :: Django :: 4.2",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering",
    ],
    zip_safe=False,
    python_requires=">=3.8",
    install_requires=install_requires,
    tests_require=tests_require,
    entry_points={"console_scripts": ["cogsense = cogsense.cli:main"]},
    test_suite="test_cogsense.run_tests.run_all",
)
