#!/usr/bin/env python

import os,sys

if os.path.exists('MANIFEST'):
    os.remove('MANIFEST')
#end

if sys.version_info[:2] < (3, 9):
    print(('pyBroadband requires Python version 3.9 or later (%d.%d detected).' %sys.version_info[:2]))
    sys.exit(-1)
#end

from setuptools import setup, find_packages


if __name__ == '__main__':
    setup(
        name             = 'pyBroadband',
        version          = '1.0.0',
        author           = 'pyBroadband Developers',
        maintainer       = 'pyBroadband Developers',
        description      = 'Python package for auditing broadband plans offered through ISP availability tools',
        long_description = 'pyBroadband drives multi-step broadband availability tool queries as a recoverable state machine against a simulator fleet, curates a block-group plan dataset and computes carriage value, spatial autocorrelation, competition and income-gap analytics',
        keywords         = 'broadband affordability carriage-value census',
        license          = 'GNU LGPL',
        platforms        = ['Windows','Linux','Mac OS-X','Unix'],
        classifiers      = ['Development Status :: 4 - Beta',
                            'Environment :: Console',
                            'Intended Audience :: Science/Research',
                            'Intended Audience :: Developers',
                            'License :: OSI Approved :: GNU Lesser General Public License v2 or later (LGPLv2+)',
                            'Operating System :: POSIX :: Linux',
                            'Operating System :: MacOS',
                            'Programming Language :: Python :: 3',
                            'Topic :: Scientific/Engineering',
                            'Topic :: Internet :: WWW/HTTP'],
        packages         = find_packages(exclude=['tests','tests.*']),
        package_data     = {'pyBroadband': ['data/*.txt','data/adapters/*.yaml','data/scenarios/*.yaml']},
        python_requires  = '>=3.9',
        install_requires = ['numpy>=1.21',
                            'pandas>=1.3',
                            'PyYAML>=5.4',
                            'rapidfuzz>=2.0',
                            'shapely>=2.0',
                            'aiohttp>=3.8',
                            'tenacity>=8.0'],
        extras_require   = {'plot': ['matplotlib>=3.4'],
                            'test': ['pytest>=7.0','scipy>=1.7']},
        entry_points     = {'console_scripts': ['pybroadband = pyBroadband.pyBroadband_cli:main']},
    )
#end
