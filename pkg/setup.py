from setuptools import setup, find_packages

with open("./requirements.txt", mode="r") as file:
    lines = file.readlines()
    requirements = [line.strip() for line in lines if line.strip()]

setup(
    name="tripx",
    version="0.1.0",
    python_requires=">=3.10",
    packages=find_packages(exclude=["*venv*", "test*", "examples*"]),
    install_requires=requirements,
    entry_points={"console_scripts": ["tripx = tripx.extract.cli:main"]},
)
