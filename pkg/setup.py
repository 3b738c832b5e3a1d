from setuptools import setup, find_packages

import yrun

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name="ysys",
    version=yrun.VERSION,
    description="ysys: periodic Y-systems in exact arithmetic",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["yrun", "yrun.*"]),
    include_package_data=True,
    package_data={"yrun": ["data/*"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],

    install_requires=[
        'plac',
        'tqdm',
        'pandas',
        'sympy',
        'networkx',
        'numpy',
    ],

    entry_points={
        'console_scripts': [
            'ysys=yrun.__main__:run',
        ],
    },

    python_requires='>=3.8',

)
