from setuptools import setup, find_packages

setup(
    name='rcforecast',
    version='1.0.0',
    description='Reference class forecasting for infrastructure projects',
    author='',
    url='',
    packages=find_packages(exclude=['test_data', 'docs', 'tests*']),
    python_requires='>=3.8',
    install_requires=['numpy>=1.19', 'scipy>=1.5', 'jsons>=1.2'],
    entry_points={'console_scripts': ['rcforecast=rcforecast.cli:main']},
)
