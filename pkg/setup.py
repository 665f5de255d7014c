from setuptools import find_packages, setup

with open("README.md", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="oscillator-shortcuts",
    version="0.2.0",
    author="Siarhei Belavus",
    author_email="siarhei_belavus@epam.com",
    description="Shortcuts to adiabaticity for a harmonic trap: inverse-invariant design, transitionless tracking and split-operator checks",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Programming Language :: Python :: 3.13",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.11",
        "python-dotenv==1.0.1",
        "mcp==1.6.0",
    ],
    entry_points={
        "console_scripts": [
            "sta=runner.cli:main",
            "sta-mcp=mmcp.server:main",
        ],
    },
)
