from setuptools import setup, find_namespace_packages


def get_description():
    return "A laboratory for rigid disks moving through viscous fluid with Navier slip"


def get_long_description():
    with open("README.md") as f:
        text = f.read()

    # Long description is everything after README's initial heading
    idx = text.find("\n\n")
    return text[idx:]


def get_requirements():
    with open("requirements.in") as f:
        return f.read().splitlines()


setup(
    name="fsilab-slip",
    version="0.1.0",
    packages=find_namespace_packages(where="src"),
    package_dir={"": "src"},
    package_data={"fsilab._slip": ["schema/*.json"]},
    license="GNU General Public License",
    description=get_description(),
    long_description=get_long_description(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    install_requires=get_requirements(),
    python_requires=">=3.8",
    entry_points={
        "console_scripts": [
            "fsilab-slip-simulate = fsilab._slip.tasks.simulate:entry_point",
            "fsilab-slip-gap-ode = fsilab._slip.tasks.gap_ode:entry_point",
            "fsilab-slip-rates = fsilab._slip.tasks.rates:entry_point",
            "fsilab-slip-check = fsilab._slip.tasks.check:entry_point",
        ]
    },
)
