#!/usr/bin/env python
'''
pyBroadband_analysis

Holds the Analysis Report Class and the analysis pipeline that turns a crawl
dataset, block group income and adjacency into block group summaries,
coefficient of variation distributions, plan vectors and their distances,
spatial autocorrelation, competition tests and income gaps.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 15/06/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - ISP Pair Composites (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor

# =============================================================================
# External Python modules
# =============================================================================
import numpy
import pandas

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import BroadbandError, EmptyInput, OutputUnwritable, DegenerateVariance, \
    TooFewNodes, NoCablePresence, InsufficientModeCoverage, NoIncomeData, SingleGroupOnly, OutOfRange
from pyBroadband.pyBroadband_history import read_dataset
from pyBroadband.pyBroadband_sampler import load_income, load_adjacency
from pyBroadband.pyBroadband_metrics import summarize_block_groups, summaries_frame, plan_vector, \
    plan_vectors_frame, pairwise_l1, intra_city_spread
from pyBroadband.pyBroadband_spatial import morans_i_test
from pyBroadband.pyBroadband_stats import competition_effect, income_fiber_gap, DUOPOLIES, CompetitionMode

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

SECTIONS = (
('block_groups', 'Block Group Summaries'),
('cov', 'Carriage Value Dispersion (CoV)'),
('plan_vectors', 'Plan Vectors and City Distances'),
('spatial', "Spatial Autocorrelation (Moran's I)"),
('competition', 'Competition Effect'),
('income', 'Income and Fiber Deployment'),
)

COV_COLUMNS = ['city','isp','block_groups','median_cov','p90_cov','share_cov_zero','spread_pct']
SPATIAL_COLUMNS = ['city','isp','morans_i','expected','p_value','n','flag']
COMPETITION_COLUMNS = ['city','isp','mode','n_monopoly','n_mode','median_monopoly','median_mode',
    'd_monopoly_below','p_monopoly_below','d_monopoly_above','p_monopoly_above','reject_below','reject_above']
INCOME_COLUMNS = ['city','isp','pct_low','pct_high','gap','n_low','n_high','dsl_pct_low','dsl_pct_high']


# =============================================================================
# Analysis Report Class
# =============================================================================
class AnalysisReport(object):

    '''
    Analysis tables by section with the errors met per (city, ISP)
    '''

    def __init__(self, out_dir=None):

        self.out_dir = out_dir
        self.tables = {}
        self.errors = dict((name, []) for name, title in SECTIONS)


    def add_table(self, section, name, frame):

        self.tables.setdefault(section, {})[name] = frame


    def add_error(self, section, error):

        self.errors[section].append(error)
        logger.info('%s: %s', section, error)


    def table(self, section, name):

        return self.tables[section][name]


    def __str__(self):

        '''
        Print Structured Analysis Report
        '''

        text = '\nBroadband Plan Analysis\n%s\n' %('='*78)
        with pandas.option_context('display.width', 160, 'display.max_columns', 40, 'display.max_rows', 60):
            for section, title in SECTIONS:
                text += '\n%s\n%s\n' %(title, '-'*len(title))
                for name, frame in sorted(self.tables.get(section,{}).items()):
                    text += '\n  [%s]\n' %(name)
                    if len(frame) == 0:
                        text += '    (empty)\n'
                    else:
                        text += frame.to_string(index=False, float_format=lambda x: '%.4f' %(x)) + '\n'
                    #end
                #end
                for error in self.errors[section]:
                    text += '  ! %s: %s\n' %(type(error).__name__, error)
                #end
            #end
        #end

        return text


    def write2file(self, outfile):

        if isinstance(outfile,str):
            with open(outfile,'a',encoding='utf-8') as fid:
                fid.write(self.__str__())
            #end
        else:
            outfile.write(self.__str__())
        #end


    def write(self, out_dir=None):

        '''
        Write every table as <name>.csv and the text report as report.txt
        '''

        out_dir = out_dir or self.out_dir
        try:
            if not os.path.isdir(out_dir):
                os.makedirs(out_dir)
            #end
            for section in self.tables:
                for name, frame in self.tables[section].items():
                    frame.to_csv(os.path.join(out_dir,'%s.csv' %(name)), index=False)
                #end
            #end
            with open(os.path.join(out_dir,'report.txt'),'w',encoding='utf-8') as fid:
                self.write2file(fid)
            #end
        except OSError as error:
            raise OutputUnwritable('Error: analysis output %s cannot be written: %s' %(out_dir,error))
        #end

        return out_dir



# =============================================================================
# City Analysis Class
# =============================================================================
class CityAnalysis(object):

    '''
    Per city rows of every section
    '''

    def __init__(self, city):

        self.city = city
        self.summaries = []
        self.rows = dict((name, []) for name, title in SECTIONS)
        self.errors = []



def _spatial_row(city, label, values, graph, permutations, seed):

    try:
        result = morans_i_test(values, graph, permutations, seed)
    except DegenerateVariance:
        # constant carriage values carry no spatial pattern
        return {'city':city, 'isp':label, 'morans_i':0.0, 'expected':numpy.nan, 'p_value':numpy.nan,
            'n':len(values), 'flag':'constant'}
    #end

    return {'city':city, 'isp':label, 'morans_i':result.statistic, 'expected':result.expected,
        'p_value':result.p_value, 'n':result.n, 'flag':''}


#==============================================================================
# analyze_city function
#==============================================================================
def analyze_city(city, records, income, graph, permutations=999, seed=0, basis='download', min_groups=5,
    prune_quantile=None, fiber_threshold_mbps=None):

    '''
    Every per city section for one city

    **Arguments:**

    - city -> STR: City name
    - records -> LIST: DatasetRecords of the city
    - income -> DICT: GEOID -> median household income
    - graph -> INST: AdjacencyGraph

    **Keyword arguments:**

    - permutations -> INT: Moran's I permutations, *Default* = 999
    - seed -> INT: Permutation seed, *Default* = 0
    - basis -> STR: Carriage value basis, *Default* = 'download'
    - min_groups, prune_quantile, fiber_threshold_mbps -> See competition_effect
    '''

    #
    result = CityAnalysis(city)
    summaries = summarize_block_groups(records, basis)
    result.summaries = summaries
    by_isp = {}
    for summary in summaries:
        by_isp.setdefault(summary.isp, []).append(summary)
    #end
    isps = sorted(by_isp.keys())

    # Dispersion
    for isp in isps:
        covs = numpy.array([summary.cov for summary in by_isp[isp]])
        cvs = [summary.median_best_cv for summary in by_isp[isp]]
        row = {'city':city, 'isp':isp, 'block_groups':len(covs), 'median_cov':float(numpy.median(covs)),
            'p90_cov':float(numpy.percentile(covs,90)), 'share_cov_zero':float((covs == 0).mean())}
        try:
            row['spread_pct'] = intra_city_spread(cvs)
        except BroadbandError as error:
            result.errors.append(('cov', error.tag(city, isp)))
            row['spread_pct'] = numpy.nan
        #end
        result.rows['cov'].append(row)
    #end

    # Spatial autocorrelation, single ISPs then ISP pairs
    values = dict((isp, dict((summary.geoid, summary.median_best_cv) for summary in by_isp[isp])) for isp in isps)
    for isp in isps:
        try:
            result.rows['spatial'].append(_spatial_row(city, isp, values[isp], graph, permutations, seed))
        except TooFewNodes as error:
            result.errors.append(('spatial', error.tag(city, isp)))
        #end
    #end
    for a, b in itertools.combinations(isps, 2):
        label = '%s & %s' %(a, b)
        composite = dict(values[a])
        for geoid, value in values[b].items():
            composite[geoid] = max(value, composite.get(geoid, value))
        #end
        try:
            result.rows['spatial'].append(_spatial_row(city, label, composite, graph, permutations, seed))
        except TooFewNodes as error:
            result.errors.append(('spatial', error.tag(city, label)))
        #end
    #end

    # Competition
    try:
        effects = competition_effect(summaries, min_groups, prune_quantile, fiber_threshold_mbps)
    except (NoCablePresence, InsufficientModeCoverage) as error:
        result.errors.append(('competition', error.tag(city)))
        effects = {}
    #end
    for isp in sorted(effects.keys()):
        effect = effects[isp]
        for mode in DUOPOLIES:
            if mode in effect.errors:
                result.errors.append(('competition', effect.errors[mode].tag(city, isp)))
                continue
            #end
            below, above = effect.tests[mode]
            result.rows['competition'].append({'city':city, 'isp':isp, 'mode':mode.value,
                'n_monopoly':below.n1, 'n_mode':below.n2,
                'median_monopoly':effect.medians[CompetitionMode.CABLE_MONOPOLY], 'median_mode':effect.medians[mode],
                'd_monopoly_below':below.d_statistic, 'p_monopoly_below':below.p_value,
                'd_monopoly_above':above.d_statistic, 'p_monopoly_above':above.p_value,
                'reject_below':below.reject, 'reject_above':above.reject})
        #end
    #end

    # Income groups over the whole city, DSL and fiber ISPs only
    city_geoids = sorted(set([record.geoid for record in records]))
    for isp in isps:
        group = by_isp[isp]
        if not any([summary.has_fiber or summary.has_dsl for summary in group]):
            continue
        #end
        fiber = dict((summary.geoid, summary.has_fiber) for summary in group)
        dsl = dict((summary.geoid, summary.has_dsl) for summary in group)
        try:
            gap = income_fiber_gap(city_geoids, income, fiber, dsl)
        except (NoIncomeData, SingleGroupOnly) as error:
            result.errors.append(('income', error.tag(city, isp)))
            continue
        #end
        row = {'city':city, 'isp':isp}
        row.update(gap.to_dict())
        result.rows['income'].append(row)
    #end

    return result


#==============================================================================
# analyze_records function
#==============================================================================
def analyze_records(records, income, graph, out_dir=None, permutations=999, seed=0, basis='download',
    min_groups=5, prune_quantile=None, fiber_threshold_mbps=None, workers=None):

    '''
    Run the analysis pipeline on dataset records, one thread per city

    Section level failures (too few block groups, missing modes, missing
    income) are recorded in the report with their (city, ISP); anything
    else propagates tagged with its city.

    **Arguments:**

    - records -> LIST: DatasetRecords
    - income -> DICT: GEOID -> median household income
    - graph -> INST: AdjacencyGraph

    **Keyword arguments:**

    - out_dir -> STR: Output directory, *Default* = None (nothing written)
    - workers -> INT: Threads, *Default* = None (one per city up to the executor default)
    - See analyze_city for the rest
    '''

    #
    if len(records) == 0:
        raise EmptyInput('Analysis needs a nonempty dataset')
    #end
    by_city = {}
    for record in records:
        by_city.setdefault(record.city, []).append(record)
    #end
    cities = sorted(by_city.keys())

    def run(city):
        try:
            return analyze_city(city, by_city[city], income, graph, permutations, seed, basis, min_groups,
                prune_quantile, fiber_threshold_mbps)
        except BroadbandError as error:
            raise error.tag(city)
        #end

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, cities))
    #end

    #
    report = AnalysisReport(out_dir)
    summaries = []
    for result in results:
        summaries.extend(result.summaries)
        for section, error in result.errors:
            report.add_error(section, error)
        #end
    #end
    report.add_table('block_groups', 'summaries', summaries_frame(summaries))
    report.add_table('cov', 'cov', pandas.DataFrame([row for result in results for row in result.rows['cov']],
        columns=COV_COLUMNS))
    spatial = pandas.DataFrame([row for result in results for row in result.rows['spatial']],
        columns=SPATIAL_COLUMNS)
    report.add_table('spatial', 'morans_i', spatial)
    medians = pandas.DataFrame(columns=['isp','median_morans_i','cities'])
    if len(spatial) > 0:
        medians = spatial.astype({'morans_i':float}).groupby('isp', as_index=False).agg(
            median_morans_i=('morans_i','median'), cities=('city','nunique'))
    #end
    report.add_table('spatial', 'morans_i_median', medians)
    report.add_table('competition', 'competition', pandas.DataFrame([row for result in results
        for row in result.rows['competition']], columns=COMPETITION_COLUMNS))
    report.add_table('income', 'income_gap', pandas.DataFrame([row for result in results for row in result.rows['income']],
        columns=INCOME_COLUMNS))

    # Plan vectors need every city of an ISP
    vectors = {}
    for summary in summaries:
        vectors.setdefault(summary.isp, {}).setdefault(summary.city, []).append(summary.median_best_cv)
    #end
    plan_vectors = []
    distances = []
    for isp in sorted(vectors.keys()):
        by_vector = {}
        for city in sorted(vectors[isp].keys()):
            try:
                by_vector[city] = plan_vector(vectors[isp][city], isp, city)
            except (OutOfRange, EmptyInput) as error:
                report.add_error('plan_vectors', error.tag(city, isp))
                continue
            #end
            plan_vectors.append(by_vector[city])
        #end
        matrix = pairwise_l1(by_vector)
        for a, b in itertools.combinations(list(matrix.index), 2):
            distances.append({'isp':isp, 'city_a':a, 'city_b':b, 'l1':float(matrix.loc[a,b])})
        #end
    #end
    report.add_table('plan_vectors', 'plan_vectors', plan_vectors_frame(plan_vectors))
    report.add_table('plan_vectors', 'l1_distances', pandas.DataFrame(distances, columns=['isp','city_a','city_b','l1']))

    # Plot ready address level carriage values
    report.add_table('block_groups', 'best_cv', pandas.DataFrame([{'city':record.city, 'isp':record.isp,
        'geoid':record.geoid, 'best_cv':record.best_cv} for record in records if record.best_cv is not None],
        columns=['city','isp','geoid','best_cv']))

    #
    if out_dir is not None:
        report.write(out_dir)
    #end

    return report


#==============================================================================
# analyze function
#==============================================================================
def analyze(dataset_path, income_path, adjacency_path, out_dir, **kwargs):

    '''
    Analysis pipeline from files, writing CSVs and report.txt to out_dir

    **Arguments:**

    - dataset_path -> STR: Crawl dataset (JSON lines)
    - income_path -> STR: Income CSV
    - adjacency_path -> STR: Edge list CSV or polygon GeoJSON
    - out_dir -> STR: Output directory

    Keyword arguments go to analyze_records.
    '''

    records = read_dataset(dataset_path)
    income = load_income(income_path)
    graph = load_adjacency(adjacency_path)

    return analyze_records(records, income, graph, out_dir, **kwargs)



#==============================================================================
# Analysis Test
#==============================================================================
if __name__ == '__main__':

    from pyBroadband.pyBroadband_synthetic import three_city_fixture, fixture_records

    print('Testing Analysis...')
    cities = three_city_fixture()
    graph = cities[0].graph
    for city in cities[1:]:
        for a in city.graph.nodes:
            for b in city.graph.neighbors(a):
                graph.add_edge(a, b)
            #end
        #end
    #end
    income = {}
    for city in cities:
        income.update(city.income)
    #end
    print(analyze_records(fixture_records(cities), income, graph, permutations=99))
