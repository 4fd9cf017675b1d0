#!/usr/bin/env python
'''
pyBroadband_plots

CDF figures from the analysis CSVs: best carriage value per ISP and city,
and block group coefficient of variation per ISP. Needs the optional
matplotlib extra.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.0   $Date: 16/06/2023 21:00$


History
-------
    v. 1.0  - Initial CDF Figures (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import logging

# =============================================================================
# External Python modules
# =============================================================================
import numpy
import pandas

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import FileMissing, EmptyInput, OutputUnwritable

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)


def _pyplot():

    try:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
    except ImportError:
        raise ImportError('Plotting needs matplotlib: pip install pyBroadband[plot]')
    #end

    return plt


def ecdf(values):

    '''
    Sorted values and their empirical CDF heights
    '''

    x = numpy.sort(numpy.asarray(values, dtype=float))

    return x, numpy.arange(1, len(x)+1)/float(len(x))


def _read(analysis_dir, name):

    path = os.path.join(analysis_dir, '%s.csv' %(name))
    if not os.path.isfile(path):
        raise FileMissing('Analysis table %s not found (run analyze first)' %(path))
    #end

    return pandas.read_csv(path)


def _cdf_figure(plt, groups, xlabel, title, filename):

    fig, ax = plt.subplots(figsize=(7,5))
    for label, values in groups:
        x, y = ecdf(values)
        ax.step(x, y, where='post', label=label)
    #end
    ax.set_xlabel(xlabel)
    ax.set_ylabel('CDF')
    ax.set_ylim(0, 1.02)
    ax.set_title(title)
    ax.legend(fontsize='small')
    fig.tight_layout()
    try:
        fig.savefig(filename, dpi=120)
    except OSError as error:
        raise OutputUnwritable('Figure %s cannot be written: %s' %(filename,error))
    finally:
        plt.close(fig)
    #end
    logger.info('wrote %s', filename)

    return filename


#==============================================================================
# plot_analysis function
#==============================================================================
def plot_analysis(analysis_dir, out_dir=None):

    '''
    Render the CDF figures of an analysis directory

    One best carriage value figure per ISP (a line per city) and one block
    group CoV figure (a line per ISP).

    **Arguments:**

    - analysis_dir -> STR: Directory written by analyze

    **Keyword arguments:**

    - out_dir -> STR: Figure directory, *Default* = analysis_dir

    Returns the list of written PNG files.
    '''

    #
    plt = _pyplot()
    out_dir = out_dir or analysis_dir
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)
    #end
    best = _read(analysis_dir, 'best_cv')
    summaries = _read(analysis_dir, 'summaries')
    if (len(best) == 0) and (len(summaries) == 0):
        raise EmptyInput('Analysis tables in %s are empty' %(analysis_dir))
    #end

    #
    files = []
    for isp, frame in best.groupby('isp'):
        groups = [(city, part['best_cv'].values) for city, part in frame.groupby('city')]
        slug = ''.join([c for c in str(isp).lower() if c.isalnum()])
        files.append(_cdf_figure(plt, groups, 'Best carriage value (Mbps/$)', '%s: best carriage value' %(isp),
            os.path.join(out_dir, 'best_cv_%s.png' %(slug))))
    #end
    if len(summaries) > 0:
        groups = [(isp, part['cov'].values) for isp, part in summaries.groupby('isp')]
        files.append(_cdf_figure(plt, groups, 'Coefficient of variation of best carriage value',
            'Block group carriage value dispersion', os.path.join(out_dir, 'cov.png')))
    #end

    return files
