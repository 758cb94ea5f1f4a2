from setuptools import setup, find_packages

with open("requirements.txt") as f:
    requirements = [line.strip() for line in f if line.strip() and line.strip() != "pytest"]

setup(
    name="flowlab",
    version="0.1.0",
    description="Flows and cocycle perturbations on nest algebras",
    packages=find_packages(include=["flowlab", "flowlab.*"]),
    install_requires=requirements,
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["flowlab = flowlab.harness.cli:main"]},
)
