# bandgate_project/setup.py
from setuptools import setup, find_packages

setup(
    name="bandgate",
    version="1.0.0",
    package_dir={"": "src"},
    packages=find_packages("src"),
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.21.0",
        "scipy>=1.7.0",
        "pandas>=1.5.0",
        "click>=8.0.0",
        "python-dotenv>=0.19.0",
        "structlog>=22.0.0",
        "psutil>=5.8.0",
    ],
    entry_points={
        "console_scripts": [
            "bandgate=bandgate.cli.commands:main",
        ],
    },
)
