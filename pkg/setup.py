from setuptools import setup, find_packages

exec(open('harmconv/__version__.py').read())
setup(
    name='harmconv',
    version=__version__,
    packages=find_packages(exclude=["tests", "benchmarks"]),
    include_package_data=False,
    description='harmonic convolutions of half-plane and strip mappings: zero counting and univalence checks.',
    install_requires=['numpy', 'scipy', 'numba'],
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['harmconv=harmconv.cli:main']},
)
