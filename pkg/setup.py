"""
superres - Superresolution quantum sensing toolkit
Resolve two nearly identical incoherent tones with a spin sensor
"""

from setuptools import setup, find_packages
from pathlib import Path

# Read README for long description
readme_path = Path(__file__).parent / "README.md"
long_description = ""
if readme_path.exists():
    long_description = readme_path.read_text(encoding="utf-8")

setup(
    name="superres",
    version="1.0.0",
    description="Frequency-separation estimation beyond the Fourier limit with a quantum sensor",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"superres": ["data/manifests/*.json", "data/manifests/configs/*.json"]},
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    python_requires=">=3.8",
    install_requires=[
        "click>=8.1.7",
        "rich>=13.5.2",
        "pyyaml>=6.0",
        "numpy>=1.22",
        "scipy>=1.8",
        "pandas>=1.5",
    ],
    extras_require={
        "test": [
            "pytest>=7.0",
            "mpmath>=1.2",
        ],
    },
    entry_points={
        "console_scripts": [
            "superres=superres.cli_wrapper:main",
        ],
    },
)
