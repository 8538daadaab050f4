#!/usr/bin/env python3
from setuptools import find_packages, setup

setup(
    name='essn-verification-helper',
    version='0.1.0',
    license='MIT License',
    description='certifiers, an online engine and abort-rate experiments for serial safety net variants',
    python_requires='>=3.8',
    install_requires=[
        'colorlog',
        'pyyaml',
        'toml',
        'networkx',
        'numpy',
        'tabulate',
    ],
    packages=find_packages(exclude=('tests', 'docs')),
    package_data={
        'essn_verify_resources': ['*.yml'],
    },
    entry_points={
        'console_scripts': [
            'essn-verify = essn_verify.main:main',
        ],
    },
)
