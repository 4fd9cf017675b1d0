#!/usr/bin/env python
'''
pyBroadband_stats

Holds the two-sample Kolmogorov-Smirnov tests, the competition mode
classification and test, and the income stratified fiber deployment gap.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.2   $Date: 12/05/2023 21:00$


History
-------
    v. 1.0  - Initial Statistics Creation (2023)
    v. 1.1  - Competition Mode Tests (2023)
    v. 1.2  - Income Groups with DSL Percentages (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import enum
import math
import logging

# =============================================================================
# External Python modules
# =============================================================================
import numpy

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import SampleTooSmall, NoCablePresence, MultipleCableISPs, \
    InsufficientModeCoverage, NoIncomeData, SingleGroupOnly

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

MIN_SAMPLE = 5
ALPHA = 0.05
ALTERNATIVES = ('a_below_b', 'a_above_b')


# =============================================================================
# KS Result Class
# =============================================================================
class KsResult(object):

    '''
    Two-sample Kolmogorov-Smirnov test result
    '''

    def __init__(self, d_statistic, p_value, direction, n1, n2, alpha=ALPHA):

        self.d_statistic = float(d_statistic)
        self.p_value = float(p_value)
        self.direction = direction
        self.n1 = n1
        self.n2 = n2
        self.alpha = alpha


    @property
    def reject(self):

        return self.p_value < self.alpha


    def to_dict(self):

        return {'direction':self.direction, 'd':self.d_statistic, 'p':self.p_value,
            'n1':self.n1, 'n2':self.n2, 'reject':self.reject}


    def __repr__(self):

        return 'KsResult(%s, D=%.4f, p=%.4g, n1=%d, n2=%d, %s)' %(self.direction, self.d_statistic,
            self.p_value, self.n1, self.n2, ['fail to reject','reject'][int(self.reject)])



def _ecdfs(sample_a, sample_b):

    '''
    ECDFs of both samples evaluated on the pooled sample points
    '''

    a = numpy.sort(numpy.asarray(sample_a, dtype=float))
    b = numpy.sort(numpy.asarray(sample_b, dtype=float))
    pooled = numpy.concatenate([a, b])
    f_a = numpy.searchsorted(a, pooled, side='right') / float(len(a))
    f_b = numpy.searchsorted(b, pooled, side='right') / float(len(b))

    return f_a, f_b


def _check_sizes(sample_a, sample_b, min_sample):

    if (len(sample_a) < min_sample) or (len(sample_b) < min_sample):
        raise SampleTooSmall('KS test needs at least %d values per sample (got %d and %d)' %(min_sample,
            len(sample_a),len(sample_b)))
    #end


#==============================================================================
# ks_one_tailed function
#==============================================================================
def ks_one_tailed(sample_a, sample_b, alternative='a_below_b', alpha=ALPHA, min_sample=MIN_SAMPLE):

    '''
    One-tailed two-sample KS test

    For a_below_b, D = sup_x (F_a(x) - F_b(x)) over the pooled sample; for
    a_above_b the ECDFs swap roles. The p-value is the asymptotic one-sided
    exp(-2 D^2 n1 n2 / (n1 + n2)), capped at 1.

    **Arguments:**

    - sample_a -> LIST: First sample
    - sample_b -> LIST: Second sample

    **Keyword arguments:**

    - alternative -> STR: 'a_below_b' or 'a_above_b', *Default* = 'a_below_b'
    - alpha -> FLOAT: Rejection level, *Default* = 0.05
    - min_sample -> INT: Smallest accepted sample, *Default* = 5
    '''

    #
    if alternative not in ALTERNATIVES:
        raise ValueError('KS alternative not understood - use a_below_b or a_above_b')
    #end
    _check_sizes(sample_a, sample_b, min_sample)

    #
    f_a, f_b = _ecdfs(sample_a, sample_b)
    if alternative == 'a_below_b':
        d = max(0.0, float((f_a - f_b).max()))
    else:
        d = max(0.0, float((f_b - f_a).max()))
    #end
    n1 = len(sample_a)
    n2 = len(sample_b)
    p = min(1.0, math.exp(-2.0*d*d*n1*n2/float(n1 + n2)))

    return KsResult(d, p, alternative, n1, n2, alpha)


def _kolmogorov_sf(y):

    '''
    Asymptotic survival function of the two-sided Kolmogorov statistic
    '''

    if y < 0.27:
        return 1.0
    #end
    p = 0.0
    sign = 1.0
    for k in range(1,101):
        term = math.exp(-2.0*k*k*y*y)
        p += sign*term
        if term <= 1e-16*p:
            break
        #end
        sign = -sign
    #end

    return min(1.0, max(0.0, 2.0*p))


#==============================================================================
# ks_two_sided function
#==============================================================================
def ks_two_sided(sample_a, sample_b, alpha=ALPHA, min_sample=MIN_SAMPLE):

    '''
    Two-sided two-sample KS test with the asymptotic Kolmogorov p-value
    '''

    _check_sizes(sample_a, sample_b, min_sample)
    f_a, f_b = _ecdfs(sample_a, sample_b)
    d = float(numpy.abs(f_a - f_b).max())
    n1 = len(sample_a)
    n2 = len(sample_b)
    en = math.sqrt(n1*n2/float(n1 + n2))

    return KsResult(d, _kolmogorov_sf((en + 0.12 + 0.11/en)*d), 'two_sided', n1, n2, alpha)


# =============================================================================
# Competition Mode Enumeration
# =============================================================================
class CompetitionMode(str, enum.Enum):

    CABLE_MONOPOLY = 'CableMonopoly'
    CABLE_DSL_DUOPOLY = 'CableDslDuopoly'
    CABLE_FIBER_DUOPOLY = 'CableFiberDuopoly'


DUOPOLIES = (CompetitionMode.CABLE_DSL_DUOPOLY, CompetitionMode.CABLE_FIBER_DUOPOLY)


def _offers_fiber(summary, fiber_threshold_mbps):

    if summary.has_fiber:
        return True
    #end
    if (fiber_threshold_mbps is not None) and (summary.max_download_mbps is not None):
        return summary.max_download_mbps >= fiber_threshold_mbps
    #end

    return False


#==============================================================================
# classify_competition function
#==============================================================================
def classify_competition(summaries, fiber_threshold_mbps=None):

    '''
    Competition mode of one block group from ISP presence and technology

    Returns (mode, cable summary).

    **Arguments:**

    - summaries -> LIST: BlockGroupSummary of every ISP present in the block group

    **Keyword arguments:**

    - fiber_threshold_mbps -> FLOAT: Count a DSL/fiber ISP as fiber when its fastest
      plan reaches this speed, *Default* = None (labels only)
    '''

    cable = [summary for summary in summaries if summary.has_cable]
    if len(cable) == 0:
        raise NoCablePresence('Block group has no cable ISP')
    #end
    if len(cable) > 1:
        raise MultipleCableISPs('Block group has %d cable ISPs: %s' %(len(cable),sorted([s.isp for s in cable])))
    #end
    others = [summary for summary in summaries if (not summary.has_cable) and (summary.has_dsl or summary.has_fiber)]
    if len(others) == 0:
        return CompetitionMode.CABLE_MONOPOLY, cable[0]
    #end
    for summary in others:
        if _offers_fiber(summary, fiber_threshold_mbps):
            return CompetitionMode.CABLE_FIBER_DUOPOLY, cable[0]
        #end
    #end

    return CompetitionMode.CABLE_DSL_DUOPOLY, cable[0]


# =============================================================================
# Competition Result Class
# =============================================================================
class CompetitionResult(object):

    '''
    Mode partition of one cable ISP's block group carriage values with tests

    tests[mode] holds (monopoly_below_duopoly, monopoly_above_duopoly)
    KsResults; errors[mode] holds the InsufficientModeCoverage of an
    untestable pair.
    '''

    def __init__(self, isp, samples):

        self.isp = isp
        self.samples = samples
        self.medians = {}
        for mode in CompetitionMode:
            if len(samples.get(mode,[])) > 0:
                self.medians[mode] = float(numpy.median(samples[mode]))
            #end
        #end
        self.tests = {}
        self.errors = {}


    def __repr__(self):

        return 'CompetitionResult(%s, %s)' %(self.isp, dict((m.value, len(v)) for m, v in self.samples.items()))



def _prune(values, quantile):

    values = numpy.asarray(values, dtype=float)
    if (quantile is None) or (len(values) == 0):
        return values
    #end

    return values[values <= numpy.quantile(values, quantile)]


#==============================================================================
# competition_effect function
#==============================================================================
def competition_effect(summaries, min_groups=MIN_SAMPLE, prune_quantile=None, fiber_threshold_mbps=None, alpha=ALPHA):

    '''
    Compare each cable ISP's carriage values across competition modes

    Block groups are classified one at a time; those without a cable ISP are
    skipped and those with several are logged and skipped. For every cable
    ISP and duopoly type both one-tailed tests run with the monopoly sample
    as the first sample.

    **Arguments:**

    - summaries -> LIST: BlockGroupSummary of every ISP in one city

    **Keyword arguments:**

    - min_groups -> INT: Block groups needed in each compared mode, *Default* = 5
    - prune_quantile -> FLOAT: Drop values above this quantile per mode, *Default* = None
    - fiber_threshold_mbps -> FLOAT: See classify_competition, *Default* = None
    - alpha -> FLOAT: Rejection level, *Default* = 0.05

    Returns a dict cable ISP -> CompetitionResult.
    '''

    #
    by_geoid = {}
    for summary in summaries:
        by_geoid.setdefault(summary.geoid, []).append(summary)
    #end
    samples = {}
    multiple = 0
    for geoid in sorted(by_geoid.keys()):
        try:
            mode, cable = classify_competition(by_geoid[geoid], fiber_threshold_mbps)
        except NoCablePresence:
            continue
        except MultipleCableISPs as error:
            multiple += 1
            logger.warning('%s: %s', geoid, error)
            continue
        #end
        samples.setdefault(cable.isp, {}).setdefault(mode, []).append(cable.median_best_cv)
    #end
    if len(samples) == 0:
        raise NoCablePresence('No block group has a cable ISP (%d with several)' %(multiple))
    #end

    #
    results = {}
    for isp in sorted(samples.keys()):
        pruned = dict((mode, _prune(values, prune_quantile)) for mode, values in samples[isp].items())
        result = CompetitionResult(isp, pruned)
        monopoly = pruned.get(CompetitionMode.CABLE_MONOPOLY, [])
        for mode in DUOPOLIES:
            duopoly = pruned.get(mode, [])
            if (len(monopoly) < min_groups) or (len(duopoly) < min_groups):
                result.errors[mode] = InsufficientModeCoverage('%s needs %d block groups per mode (monopoly %d, %s %d)'
                    %(isp,min_groups,len(monopoly),mode.value,len(duopoly)), isp=isp)
                continue
            #end
            result.tests[mode] = (ks_one_tailed(monopoly, duopoly, 'a_below_b', alpha, min_groups),
                ks_one_tailed(monopoly, duopoly, 'a_above_b', alpha, min_groups))
        #end
        results[isp] = result
    #end
    if sum([len(result.tests) for result in results.values()]) == 0:
        raise InsufficientModeCoverage('No cable ISP has %d block groups in the monopoly and a duopoly mode' %(min_groups))
    #end

    return results


# =============================================================================
# Income Groups Class
# =============================================================================
class IncomeGroups(object):

    '''
    Split of a city's income-known block groups at its median income
    '''

    def __init__(self, low, high, median_income):

        self.low = set(low)
        self.high = set(high)
        self.median_income = median_income



def income_groups(geoids, income):

    '''
    Low (strictly below the median block group income) and high groups

    **Arguments:**

    - geoids -> LIST: Block groups of the city
    - income -> DICT: GEOID -> median household income
    '''

    known = sorted(set([geoid for geoid in geoids if geoid in income]))
    if len(known) < 2:
        raise NoIncomeData('Income split needs at least 2 block groups with known income (got %d)' %(len(known)))
    #end
    median = float(numpy.median([income[geoid] for geoid in known]))
    low = [geoid for geoid in known if income[geoid] < median]
    high = [geoid for geoid in known if income[geoid] >= median]

    return IncomeGroups(low, high, median)


# =============================================================================
# Income Gap Class
# =============================================================================
class IncomeGap(object):

    def __init__(self, pct_low, pct_high, n_low, n_high, dsl_pct_low=None, dsl_pct_high=None):

        self.pct_low = pct_low
        self.pct_high = pct_high
        self.gap = pct_high - pct_low
        self.n_low = n_low
        self.n_high = n_high
        self.dsl_pct_low = dsl_pct_low
        self.dsl_pct_high = dsl_pct_high


    def to_dict(self):

        return {'pct_low':self.pct_low, 'pct_high':self.pct_high, 'gap':self.gap,
            'n_low':self.n_low, 'n_high':self.n_high,
            'dsl_pct_low':self.dsl_pct_low, 'dsl_pct_high':self.dsl_pct_high}


    def __repr__(self):

        return 'IncomeGap(low=%.1f%%, high=%.1f%%, gap=%.1f)' %(self.pct_low, self.pct_high, self.gap)



#==============================================================================
# income_fiber_gap function
#==============================================================================
def income_fiber_gap(block_groups, income, fiber, dsl=None):

    '''
    Percentage point difference in fiber availability, high minus low income

    **Arguments:**

    - block_groups -> LIST: Every GEOID of the city, served by the ISP or not
    - income -> DICT: GEOID -> median household income
    - fiber -> DICT: GEOID -> fiber plans available, absent GEOIDs count as no fiber

    **Keyword arguments:**

    - dsl -> DICT: GEOID -> DSL plans available, *Default* = None
    '''

    # split at the city median, not the median of the served block groups
    groups = income_groups(block_groups, income)
    if (len(groups.low) == 0) or (len(groups.high) == 0):
        raise SingleGroupOnly('Income split left an empty group (low %d, high %d)' %(len(groups.low),len(groups.high)))
    #end

    def pct(flags, group):
        return 100.0*sum([1 for geoid in group if flags.get(geoid,False)])/len(group)

    dsl_low = dsl_high = None
    if dsl is not None:
        dsl_low = pct(dsl, groups.low)
        dsl_high = pct(dsl, groups.high)
    #end

    return IncomeGap(pct(fiber, groups.low), pct(fiber, groups.high), len(groups.low), len(groups.high), dsl_low, dsl_high)



#==============================================================================
# Stats Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Stats...')
    rng = numpy.random.default_rng(0)
    low, high = rng.normal(10, 1, 60), rng.normal(11, 1, 60)
    print(ks_one_tailed(low, high))
    print(ks_two_sided(low, rng.normal(10, 1, 60)))
