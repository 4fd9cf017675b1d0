#!/usr/bin/env python
'''
pyBroadband_metrics

Holds the carriage value kernels, the Block Group Summary Class and the
Plan Vector Class with its L1 distance.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 18/04/2023 21:00$


History
-------
    v. 1.0  - Initial Metrics Creation (2023)
    v. 1.1  - Upload Basis and Intra City Spread (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import math
import logging

# =============================================================================
# External Python modules
# =============================================================================
import numpy
import pandas

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import NonPositiveInput, EmptyPlans, EmptyInput, ZeroMean, OutOfRange
from pyBroadband.pyBroadband_plan import Technology

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

N_BINS = 30
SUMMARY_COLUMNS = ['geoid','isp','median_best_cv','cov','n','has_fiber','has_dsl','has_cable']


#==============================================================================
# carriage_value function
#==============================================================================
def carriage_value(download_mbps, monthly_price_usd):

    '''
    Mbps carried per dollar of monthly price

    **Arguments:**

    - download_mbps -> FLOAT: Speed in Mbps
    - monthly_price_usd -> FLOAT: Monthly price in USD
    '''

    if (download_mbps <= 0) or (monthly_price_usd <= 0):
        raise NonPositiveInput('Carriage value needs positive speed and price (%r, %r)' %(download_mbps,monthly_price_usd))
    #end

    return float(download_mbps) / float(monthly_price_usd)


def plan_cv(plan, basis='download'):

    '''
    Carriage value of a Plan on the download (default) or upload speed
    '''

    if basis == 'download':
        return carriage_value(plan.download_mbps, plan.monthly_price_usd)
    elif basis == 'upload':
        return carriage_value(plan.upload_mbps, plan.monthly_price_usd)
    #end

    raise ValueError('Carriage value basis not understood - use download or upload')


#==============================================================================
# best_cv function
#==============================================================================
def best_cv(plans, basis='download'):

    '''
    Best carriage value over the plans offered at one address

    **Arguments:**

    - plans -> LIST: Plan instances

    **Keyword arguments:**

    - basis -> STR: 'download' or 'upload' speed, *Default* = 'download'
    '''

    if len(plans) == 0:
        raise EmptyPlans('best_cv needs at least one plan')
    #end

    return max([plan_cv(plan, basis) for plan in plans])


#==============================================================================
# block_group_median_cv function
#==============================================================================
def block_group_median_cv(best_cvs):

    '''
    Median of per-address best carriage values (midpoint rule on even counts)
    '''

    if len(best_cvs) == 0:
        raise EmptyInput('block_group_median_cv needs at least one value')
    #end

    return float(numpy.median(numpy.asarray(best_cvs, dtype=float)))


#==============================================================================
# coefficient_of_variation function
#==============================================================================
def coefficient_of_variation(values):

    '''
    Population standard deviation over mean
    '''

    if len(values) == 0:
        raise EmptyInput('coefficient_of_variation needs at least one value')
    #end
    values = numpy.asarray(values, dtype=float)
    mean = values.mean()
    if mean <= 0:
        raise ZeroMean('coefficient_of_variation needs a positive mean (got %g)' %(mean))
    #end

    return float(values.std(ddof=0) / mean)


# =============================================================================
# Plan Vector Class
# =============================================================================
class PlanVector(object):

    '''
    Thirty bin distribution of block group carriage values

    weights[k-1] holds the fraction of block groups with ceil(cv) == k.
    '''

    def __init__(self, weights, isp=None, city=None):

        self.weights = numpy.asarray(weights, dtype=float)
        if self.weights.shape != (N_BINS,):
            raise ValueError('Plan vector needs %d weights (got %s)' %(N_BINS,self.weights.shape))
        #end
        if (self.weights < 0).any():
            raise ValueError('Plan vector weights must be nonnegative')
        #end
        self.isp = isp
        self.city = city


    def __eq__(self, other):

        if not isinstance(other,PlanVector):
            return NotImplemented
        #end

        return bool(numpy.array_equal(self.weights, other.weights))


    def __repr__(self):

        nonzero = ['%d:%.3f' %(k+1, w) for k, w in enumerate(self.weights) if w > 0]

        return 'PlanVector(%s)' %(', '.join(nonzero))



#==============================================================================
# plan_vector function
#==============================================================================
def plan_vector(bg_median_cvs, isp=None, city=None):

    '''
    Ceil-discretized distribution of block group median carriage values

    **Arguments:**

    - bg_median_cvs -> LIST: Block group median carriage values in (0, 30]
    '''

    if len(bg_median_cvs) == 0:
        raise EmptyInput('plan_vector needs at least one block group')
    #end
    values = numpy.asarray(bg_median_cvs, dtype=float)
    if (values <= 0).any() or (values > N_BINS).any():
        raise OutOfRange('Carriage values must lie in (0, %d] (got min %g, max %g)' %(N_BINS,values.min(),values.max()))
    #end

    #
    bins = numpy.ceil(values).astype(int)
    counts = numpy.bincount(bins - 1, minlength=N_BINS)

    return PlanVector(counts / float(len(values)), isp=isp, city=city)


#==============================================================================
# l1_distance function
#==============================================================================
def l1_distance(a, b):

    '''
    L1 norm of the difference of two plan vectors, in [0, 2]
    '''

    return float(numpy.abs(a.weights - b.weights).sum())


def pairwise_l1(vectors):

    '''
    L1 distance matrix between the cities of one ISP

    **Arguments:**

    - vectors -> DICT: city -> PlanVector

    Returns a pandas DataFrame indexed and labelled by city.
    '''

    cities = sorted(vectors.keys())
    matrix = numpy.zeros((len(cities),len(cities)))
    for i in range(len(cities)):
        for j in range(i+1,len(cities)):
            matrix[i,j] = matrix[j,i] = l1_distance(vectors[cities[i]], vectors[cities[j]])
        #end
    #end

    return pandas.DataFrame(matrix, index=cities, columns=cities)


def intra_city_spread(bg_median_cvs):

    '''
    Percent by which the best block group carriage value exceeds the worst
    '''

    if len(bg_median_cvs) == 0:
        raise EmptyInput('intra_city_spread needs at least one block group')
    #end
    values = numpy.asarray(bg_median_cvs, dtype=float)
    if values.min() <= 0:
        raise NonPositiveInput('intra_city_spread needs positive carriage values')
    #end

    return float(100.0*(values.max() - values.min())/values.min())


# =============================================================================
# Block Group Summary Class
# =============================================================================
class BlockGroupSummary(object):

    '''
    Per (ISP, block group) carriage value summary
    '''

    def __init__(self, geoid, isp, median_best_cv, cov, n_addresses, has_fiber, has_dsl, has_cable,
        city=None, max_download_mbps=None):

        if n_addresses < 1:
            raise EmptyInput('Block group %s summary needs at least one address' %(geoid))
        #end
        if cov < 0:
            raise ValueError('Block group %s coefficient of variation must be >= 0' %(geoid))
        #end
        self.geoid = geoid
        self.isp = isp
        self.median_best_cv = float(median_best_cv)
        self.cov = float(cov)
        self.n_addresses = int(n_addresses)
        self.has_fiber = bool(has_fiber)
        self.has_dsl = bool(has_dsl)
        self.has_cable = bool(has_cable)
        self.city = city
        self.max_download_mbps = max_download_mbps


    def to_dict(self):

        return {'geoid':self.geoid, 'isp':self.isp, 'median_best_cv':self.median_best_cv,
            'cov':self.cov, 'n':self.n_addresses, 'has_fiber':self.has_fiber,
            'has_dsl':self.has_dsl, 'has_cable':self.has_cable}


    def __repr__(self):

        return 'BlockGroupSummary(%s, %s, cv=%.3f, cov=%.3f, n=%d)' %(self.geoid, self.isp,
            self.median_best_cv, self.cov, self.n_addresses)



#==============================================================================
# summarize_block_groups function
#==============================================================================
def summarize_block_groups(records, basis='download'):

    '''
    Build one BlockGroupSummary per (ISP, block group) from dataset records

    Only Hit records contribute. Technology flags come from the plan
    technology labels alone.

    **Arguments:**

    - records -> LIST: DatasetRecord instances

    **Keyword arguments:**

    - basis -> STR: Carriage value basis, *Default* = 'download'
    '''

    groups = {}
    for record in records:
        if not record.plans:
            continue
        #end
        key = (record.isp, record.geoid)
        groups.setdefault(key, {'city':record.city, 'cvs':[], 'tech':set(), 'max_down':0.0})
        group = groups[key]
        group['cvs'].append(best_cv(record.plans, basis))
        for plan in record.plans:
            group['tech'].add(plan.technology)
            group['max_down'] = max(group['max_down'], plan.download_mbps)
        #end
    #end

    summaries = []
    for key in sorted(groups.keys()):
        group = groups[key]
        summaries.append(BlockGroupSummary(key[1], key[0], block_group_median_cv(group['cvs']),
            coefficient_of_variation(group['cvs']), len(group['cvs']),
            Technology.FIBER in group['tech'], Technology.DSL in group['tech'],
            Technology.CABLE in group['tech'], city=group['city'], max_download_mbps=group['max_down']))
    #end
    logger.debug('summarized %d block groups from %d records', len(summaries), len(records))

    return summaries


def summaries_frame(summaries):

    '''
    Block group summaries as a pandas DataFrame in export column order
    '''

    frame = pandas.DataFrame([summary.to_dict() for summary in summaries], columns=SUMMARY_COLUMNS)
    frame['city'] = [summary.city for summary in summaries]

    return frame


def plan_vectors_frame(vectors):

    '''
    Plan vectors as 30 column rows keyed by (isp, city)

    **Arguments:**

    - vectors -> LIST: PlanVector instances with isp and city set
    '''

    rows = []
    for vector in vectors:
        row = {'isp':vector.isp, 'city':vector.city}
        for k in range(N_BINS):
            row['bin_%02d' %(k+1)] = vector.weights[k]
        #end
        rows.append(row)
    #end

    return pandas.DataFrame(rows, columns=['isp','city'] + ['bin_%02d' %(k+1) for k in range(N_BINS)])



#==============================================================================
# Metrics Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Metrics...')
    print(carriage_value(1000, 80))
    print(plan_vector([10.5, 11.3, 14.63]))
