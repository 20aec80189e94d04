from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="rg-bose",
    version="0.2.0",
    author="rg-bose contributors",
    description="A numerical renormalization-group laboratory for the interacting Bose gas",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "attrs>=22.1",
        "python-dotenv",
        "diskcache",
        "jsonschema",
    ],
    entry_points={
        "console_scripts": [
            "rg-bose=rgbose.cli:main",
        ],
    },
    package_data={
        "rgbose": ["schemas/*.json"],
    },
)
