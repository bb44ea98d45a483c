#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""The setup script."""

from setuptools import setup, find_packages

with open('README.md') as readme_file:
    readme = readme_file.read()

with open('CHANGELOG.md') as history_file:
    history = history_file.read()

requirements = [
    'numpy>=1.21',
    'scipy>=1.7',
    'colorlog>=4.0.2',
    'jsonschema>=3.2',
    'attrdict3>=2.0.2',
    'sentry-sdk>=0.11.1',
]

setup_requirements = ['pytest-runner', ]

test_requirements = ['pytest', ]

setup(
    author="Adamos Kyriakou",
    author_email='adam@bearnd.io',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
    description=("Privacy-utility optimal release channels under individual "
                 "and collusion leakage budgets."),
    entry_points={
        'console_scripts': [
            'adaptpriv=adaptpriv.adaptpriv:main',
        ],
    },
    install_requires=requirements,
    long_description=readme + '\n\n' + history,
    long_description_content_type='text/markdown',
    include_package_data=True,
    package_data={'adaptpriv': ['instances/*.json']},
    keywords='adaptpriv',
    name='adaptive-privacy',
    packages=find_packages(include=['adaptpriv', 'adaptpriv.*']),
    python_requires='>=3.8',
    setup_requires=setup_requirements,
    test_suite='tests',
    tests_require=test_requirements,
    version='0.1.1',
    zip_safe=False,
)
