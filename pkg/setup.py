import haicapy.const as haicapy_const
import os

from setuptools import setup


def readme():
    with open(os.path.join(os.path.dirname(__file__), 'README.rst')) as f:
        return f.read()


setup(
    name=haicapy_const.PROJECT_NAME,
    version=haicapy_const.PROJECT_VERSION,
    description=haicapy_const.PROJECT_DESCRIPTION,
    long_description=readme(),
    packages=['haicapy'],
    package_data={'haicapy': ['layouts/*.layout']},
    install_requires=['numpy>=1.17', 'scipy>=1.4'],
    extras_require={'test': ['pytest']},
    python_requires='>=3.8',
    entry_points={
        'console_scripts': ['haicapy=haicapy.__main__:main'],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Software Development :: Libraries :: Python Modules'
    ]
)
