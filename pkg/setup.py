import re
from pathlib import Path

from setuptools import find_packages, setup


def read(fname):
    p = Path(__file__).parent / fname
    with p.open(encoding="utf-8") as f:
        return f.read()


def get_version(prop, project):
    project = Path(__file__).parent / project / "__init__.py"
    result = re.search(
        r'{}\s*=\s*[\'"]([^\'"]*)[\'"]'.format(prop), project.read_text()
    )
    return result.group(1)


setup(
    name="ivcleach",
    version=get_version("__version__", "ivcleach"),
    description="Round-based simulator comparing IVC-LEACH and LEACH clustering for wireless sensor networks",
    long_description=read("README.md"),
    long_description_content_type="text/markdown",
    license="Apache2",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "Click>=7.1.2, <9.0",
        "PyYAML>=5.4, <7.0",
        "tqdm>=4.35.0, <5.0",
        "pydantic>=1.10, <2.0",
        "numpy>=1.20, <3.0",
        "matplotlib>=3.4, <4.0",
    ],
    python_requires=">=3.8",
    tests_require=["pytest"],
    entry_points={
        "console_scripts": [
            "ivcleach=ivcleach.cli:cli"
        ]  # command=package.module:function
    },
)
