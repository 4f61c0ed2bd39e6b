# -*- coding: utf-8 -*-
from setuptools import setup, find_packages
# To use a consistent encoding
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

with open(path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

setup(
    name='kdmltc',

    # Versions should comply with PEP440.  For a discussion on single-sourcing
    # the version across setup.py and the project code, see
    # https://packaging.python.org/en/latest/single_source_version.html
    version='0.1',

    description='Knowledge distillation for multi-label text classification',
    long_description=long_description,
    long_description_content_type='text/markdown',

    # The project's main homepage.
    url=None,

    # Author details
    author='the kdmltc developers',

    # Choose your license
    license='GPLv3',

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Text Processing :: Linguistic',

        'License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)',

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],

    keywords='knowledge distillation multi-label text classification particle swarm',

    packages=find_packages(exclude=['contrib', 'docs', 'test', 'Scripts']),

    python_requires='>=3.8',

    # bitarray holds the per-document label sets, tables the HDF5 model checkpoints
    install_requires=['numpy>=1.17', 'scipy', 'bitarray', 'tables'],

    extras_require={
        'test': ["pytest"],
    },

    entry_points={
        'console_scripts': [
            'kdmltc=kdmltc.cli:main',
        ],
    },

    package_data={
    },

    data_files=[],
)
