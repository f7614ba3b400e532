from setuptools import setup, find_packages

setup(
    name="brnr",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    py_modules=["cli", "utils"],
    install_requires=[
        "numpy",
        "pydantic>=2.0",
        "rich",
        "sympy"
    ],
    extras_require={
        "test": ["pytest"]
    },
    entry_points={
        "console_scripts": ["brnr=cli:main"]
    }
)
