#!/usr/bin/env python

import os

import pandas
import pytest

from pyBroadband.pyBroadband_analysis import AnalysisReport, analyze, analyze_records, SECTIONS
from pyBroadband.pyBroadband_error import EmptyInput, OutputUnwritable, FileMissing, NoCablePresence, TooFewNodes
from pyBroadband.pyBroadband_spatial import AdjacencyGraph
from pyBroadband.pyBroadband_history import DatasetRecord
from pyBroadband.pyBroadband_plan import Plan
from pyBroadband.pyBroadband_synthetic import fixture_records, write_fixture, competition_city, income_city, \
    PLANTED_MONOPOLY_MEDIAN, PLANTED_DUOPOLY_MEDIAN, PLANTED_D


TABLES = ('summaries', 'best_cv', 'cov', 'plan_vectors', 'l1_distances', 'morans_i', 'morans_i_median',
    'competition', 'income_gap')


@pytest.fixture(scope='module')
def fixture_analysis(tmp_path_factory, small_cities):

    directory = str(tmp_path_factory.mktemp('fixture'))
    paths = write_fixture(directory, small_cities, fixture_records(small_cities))
    out_dir = os.path.join(directory, 'analysis')
    report = analyze(paths['dataset'], paths['income'], paths['adjacency'], out_dir, permutations=99)

    return report, out_dir


def test_fixture_writes_every_section(fixture_analysis):

    report, out_dir = fixture_analysis
    for name in TABLES:
        assert os.path.isfile(os.path.join(out_dir, '%s.csv' %(name)))
    #end
    text = open(os.path.join(out_dir, 'report.txt')).read()
    for section, title in SECTIONS:
        assert title in text
    #end


def test_fixture_block_groups(fixture_analysis):

    report, out_dir = fixture_analysis
    summaries = report.table('block_groups', 'summaries')
    assert 90 <= len(summaries) <= 96
    assert set(summaries['city']) == set(['New Orleans', 'Wichita', 'Billings'])
    assert (summaries['cov'] >= 0).all()
    best = pandas.read_csv(os.path.join(out_dir, 'best_cv.csv'))
    assert (best['best_cv'] > 0).all()

    cov = report.table('cov', 'cov')
    assert len(cov) == 6
    assert (cov['spread_pct'] >= 0).all()


def test_fixture_spatial(fixture_analysis):

    report, out_dir = fixture_analysis
    spatial = report.table('spatial', 'morans_i')
    # two ISPs and their pair per city
    assert len(spatial) == 9
    assert set(spatial[spatial['city'] == 'Billings']['isp']) == set(['CenturyLink', 'Spectrum', 'CenturyLink & Spectrum'])
    row = spatial[(spatial['city'] == 'New Orleans') & (spatial['isp'] == 'AT&T')].iloc[0]
    assert row['morans_i'] > 0
    assert row['n'] == 16
    medians = report.table('spatial', 'morans_i_median')
    assert set(medians['isp']) == set(spatial['isp'])


def test_fixture_plan_vectors_and_distances(fixture_analysis):

    report, out_dir = fixture_analysis
    vectors = report.table('plan_vectors', 'plan_vectors')
    assert len(vectors) + len(report.errors['plan_vectors']) == 6
    distances = report.table('plan_vectors', 'l1_distances')
    assert set(distances['isp']) <= set(['AT&T', 'Cox'])
    assert ((distances['l1'] >= 0) & (distances['l1'] <= 2)).all()


def test_fixture_competition_and_income(fixture_analysis):

    report, out_dir = fixture_analysis
    # every fixture block group has both ISPs, so no monopoly sample exists
    assert len(report.table('competition', 'competition')) == 0
    assert len(report.errors['competition']) >= 1
    assert all([error.city is not None for error in report.errors['competition']])
    income = report.table('income', 'income_gap')
    assert ('New Orleans', 'AT&T') in set(zip(income['city'], income['isp']))
    assert ('Billings', 'CenturyLink') in set(zip(income['city'], income['isp']))
    assert 'Cox' not in set(income['isp'])


def test_planted_sections():

    records, income = income_city()
    records = competition_city() + records
    report = analyze_records(records, income, AdjacencyGraph(), permutations=19)

    competition = report.table('competition', 'competition')
    fiber = competition[competition['mode'] == 'CableFiberDuopoly'].iloc[0]
    assert fiber['median_monopoly'] == pytest.approx(PLANTED_MONOPOLY_MEDIAN, abs=0.01)
    assert fiber['median_mode'] == pytest.approx(PLANTED_DUOPOLY_MEDIAN, abs=0.01)
    assert fiber['d_monopoly_below'] == pytest.approx(PLANTED_D, abs=0.05)
    assert bool(fiber['reject_below'])
    assert not bool(fiber['reject_above'])
    dsl = competition[competition['mode'] == 'CableDslDuopoly'].iloc[0]
    assert not bool(dsl['reject_below'])

    gap = report.table('income', 'income_gap')
    row = gap[gap['city'] == 'Planted Income'].iloc[0]
    assert row['gap'] == pytest.approx(16.0)

    # no adjacency: every spatial statistic is skipped with its context
    assert len(report.table('spatial', 'morans_i')) == 0
    assert all([isinstance(error, TooFewNodes) for error in report.errors['spatial']])
    assert 'Planted Income' in set([error.city for error in report.errors['spatial']])


def test_income_gap_on_partly_served_city():

    geoids = ['220710017%03d' %(i) for i in range(6)]
    income = dict((geoid, 10000.0*(i + 1)) for i, geoid in enumerate(geoids))
    offers = {3:Plan(300, 300, 55, 'fiber'), 4:Plan(25, 5, 55, 'dsl'), 5:Plan(1000, 1000, 80, 'fiber')}
    records = []
    for i, geoid in enumerate(geoids):
        if i in offers:
            records.append(DatasetRecord('%s-0' %(geoid), geoid, 'Partial', 'AT&T', 'Hit', plans=[offers[i]]))
        else:
            records.append(DatasetRecord('%s-0' %(geoid), geoid, 'Partial', 'AT&T', 'Unserviceable'))
        #end
    #end
    report = analyze_records(records, income, AdjacencyGraph(), permutations=19)
    row = report.table('income', 'income_gap').iloc[0]
    assert (row['n_low'], row['n_high']) == (3, 3)
    assert row['pct_low'] == 0.0
    assert row['pct_high'] == pytest.approx(200.0/3)
    assert row['dsl_pct_high'] == pytest.approx(100.0/3)


def test_single_isp_city_degrades(small_cities):

    records = [r for r in fixture_records(small_cities[:1]) if r.isp == 'AT&T']
    graph = small_cities[0].graph
    report = analyze_records(records, small_cities[0].income, graph, permutations=19)
    assert len(report.table('spatial', 'morans_i')) == 1
    assert isinstance(report.errors['competition'][0], NoCablePresence)
    assert report.errors['competition'][0].city == 'New Orleans'
    assert len(report.table('plan_vectors', 'l1_distances')) == 0
    assert 'Competition Effect' in str(report)


def test_analysis_errors(tmp_path, small_cities):

    with pytest.raises(EmptyInput):
        analyze_records([], {}, AdjacencyGraph())
    #end
    blocker = tmp_path / 'taken'
    blocker.write_text('')
    records = [r for r in fixture_records(small_cities[:1]) if r.isp == 'AT&T']
    with pytest.raises(OutputUnwritable):
        analyze_records(records, {}, small_cities[0].graph, out_dir=str(blocker), permutations=9)
    #end
    with pytest.raises(FileMissing):
        analyze(str(tmp_path / 'absent.jsonl'), 'x.csv', 'y.csv', str(tmp_path / 'out'))
    #end


def test_plots(fixture_analysis, tmp_path):

    pytest.importorskip('matplotlib')
    from pyBroadband.pyBroadband_plots import plot_analysis, ecdf

    report, out_dir = fixture_analysis
    files = plot_analysis(out_dir, str(tmp_path / 'figures'))
    assert os.path.join(str(tmp_path / 'figures'), 'cov.png') in files
    assert os.path.join(str(tmp_path / 'figures'), 'best_cv_att.png') in files
    assert all([os.path.getsize(name) > 0 for name in files])
    with pytest.raises(FileMissing):
        plot_analysis(str(tmp_path / 'empty'))
    #end
    x, y = ecdf([3.0, 1.0, 2.0])
    assert list(x) == [1.0, 2.0, 3.0]
    assert y[-1] == 1.0
