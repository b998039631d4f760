"""A setuptools based setup module.

See:
https://packaging.python.org/en/latest/distributing.html
https://github.com/pypa/sampleproject
"""

# Always prefer setuptools over distutils
from setuptools import setup, find_packages
# To use a consistent encoding
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

# Get the version number from the VERSION file
version_dict = {}
with open(path.join(here, 'vocalfoley', '__version__.py')) as version_file:
    exec(version_file.read(), version_dict)                                     # pylint: disable=W0122

version = version_dict.get('__version__')


setup(
    name='vocalfoley',

    version=version,

    description=('Environmental sound synthesis from vocal imitations and sound '
                 'event labels'),

    long_description = long_description,
    long_description_content_type = 'text/x-rst',

    license='MIT',

    classifiers=[
        'Development Status :: 3 - Alpha',

        'Operating System :: OS Independent',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Developers',

        'Topic :: Multimedia :: Sound/Audio :: Sound Synthesis',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Software Development :: Libraries :: Python Modules',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],

    zip_safe = False,

    keywords=('audio sound synthesis vocal imitation foley tacotron griffin-lim '
              'k-means mel spectrogram'),

    packages=find_packages(exclude=['contrib', 'docs', 'tests']),

    install_requires=[
        'validator-collection>=1.4.0',
        'simplejson>=3.0',
        'PyYAML>=5.1',
        'numpy>=1.20',
        'scipy>=1.6',
        'librosa>=0.9',
        'soundfile>=0.10',
        'scikit-learn>=1.0',
        'torch>=1.10',
        'pandas>=1.2',
        'matplotlib>=3.3',
    ],

    extras_require={
        'dev': ['check-manifest',
                'sphinx',
                'sphinx-rtd-theme',
                'sphinx-tabs',
                'readme-renderer',
                'restview'],
        'tests': ['coverage',
                  'pytest',
                  'pytest-cov',
                  'tox',
                  'codecov'],
    },

    python_requires='>=3.8, <4',

    package_data={
        'vocalfoley': ['data/*.yaml'],
    },

    entry_points={
        'console_scripts': [
            'vocalfoley=vocalfoley.cli:main',
        ],
    },
)
