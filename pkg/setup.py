import codecs
from setuptools import setup, find_packages

version = '1.0.0.dev0'

entry_points = {
    'console_scripts': [
        'nti-alphapotential = nti.alphapotential.cli:main',
    ],
}

TESTS_REQUIRE = [
    'coverage',
    'fudge',
    'nti.testing',
    'pyhamcrest',
    'pylint',
    'zope.testrunner',
]

def _read(fname):
    with codecs.open(fname, encoding='UTF-8') as f:
        return f.read()

setup(
    name='nti.alphapotential',
    version=version,
    author='Jason Madden',
    author_email='jason@nextthought.com',
    description="Alpha-potential distributed stochastic differential games",
    long_description=_read('README.rst') + _read('CHANGES.rst'),
    license='Apache',
    keywords='stochastic differential game potential game policy gradient jump diffusion',
    url='https://github.com/NextThought/nti.alphapotential',
    zip_safe=True,
    classifiers=[
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Development Status :: 3 - Alpha',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    packages=find_packages('src'),
    package_dir={'': 'src'},
    include_package_data=True,
    python_requires='>=3.9',
    tests_require=TESTS_REQUIRE,
    install_requires=[
        'matplotlib',
        'networkx >= 2.7',
        'numpy >= 1.20',
        'perfmetrics',
        'scipy >= 1.6',
        'setuptools',
        'transaction >= 3.0.0',
        'zope.cachedescriptors',
        'zope.exceptions',
        'zope.interface',
        'zope.event',
    ],
    extras_require={
        'test': TESTS_REQUIRE,
        'docs': [
            'Sphinx >= 2.1.2',
            'repoze.sphinx.autointerface',
            'pyhamcrest',
            'sphinx_rtd_theme',
        ],
    },
    entry_points=entry_points
)
