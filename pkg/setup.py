#!/usr/bin/env python

from setuptools import setup, find_packages

# Get metadata without importing the package
with open('toboggan/metadata.py') as metadata_file:
    exec(metadata_file.read())
    metadata = locals()

with open('README.rst') as readme_file:
    readme = readme_file.read()

requirements = [
    'argparse',
    'numpy',
    'scipy',
    'mpmath',
]

test_requirements = [
    'pytest',
    'sympy',
]

setup(
    author=metadata['__author__'],
    author_email=metadata['__email__'],
    url=metadata['__url__'],
    version=metadata['__version__'],
    python_requires='>=3.8',
    description=metadata['__summary__'],
    entry_points={
        'console_scripts': [
            'toboggan=toboggan.cli:main',
        ],
    },
    install_requires=requirements,
    extras_require={
        'test': test_requirements,
    },
    license='MIT license',
    long_description=readme,
    long_description_content_type='text/x-rst',
    include_package_data=True,
    keywords='python PT symmetry quantum toboggan complex contour shooting',
    name='toboggan',
    packages=find_packages(include=['toboggan', 'toboggan.*']),
    test_suite='tests',
)
