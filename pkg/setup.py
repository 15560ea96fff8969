from pathlib import Path

from setuptools import find_packages, setup

install_requires = open("requirements.txt").read()


HERE = Path(__file__).parent

README = (HERE / "README.rst").read_text()

setup(
    name="cableflat",
    version="0.1.0",
    description="Flatness-based trajectory planning, simulation and identification"
    " of elastic cables carried by quadrotors",
    long_description=README,
    long_description_content_type="text/x-rst",
    license="Apache License 2.0",
    classifiers=[
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering",
        "License :: OSI Approved :: Apache Software License",
    ],
    python_requires=">=3.8",
    install_requires=install_requires,
    include_package_data=True,
    package_data={"cableflat": ["fixtures/*.json", "fixtures/scenarios/*.json"]},
    packages=find_packages(exclude=["tests", "tests.*", "docs"]),
    entry_points={"console_scripts": ["cableflat=cableflat.cli:main"]},
)
