#!/usr/bin/env python

import numpy
import pytest

from pyBroadband.pyBroadband_error import SampleTooSmall, NoCablePresence, MultipleCableISPs, \
    InsufficientModeCoverage, NoIncomeData, SingleGroupOnly
from pyBroadband.pyBroadband_metrics import BlockGroupSummary, summarize_block_groups
from pyBroadband.pyBroadband_stats import ks_one_tailed, ks_two_sided, CompetitionMode, classify_competition, \
    competition_effect, income_groups, income_fiber_gap
from pyBroadband.pyBroadband_synthetic import competition_city, income_city, PLANTED_MONOPOLY_MEDIAN, \
    PLANTED_DUOPOLY_MEDIAN, PLANTED_D


def sweep(a, b):

    # ECDF difference evaluated at every observation
    a = numpy.sort(numpy.asarray(a, dtype=float))
    b = numpy.sort(numpy.asarray(b, dtype=float))
    points = numpy.concatenate([a, b])
    f_a = numpy.searchsorted(a, points, side='right') / float(len(a))
    f_b = numpy.searchsorted(b, points, side='right') / float(len(b))

    return max(0.0, float(numpy.max(f_a - f_b)))


def summary(isp, tech, geoid='220710017001', cv=5.0, max_down=None):

    return BlockGroupSummary(geoid, isp, cv, 0.1, 10, tech == 'fiber', tech == 'dsl', tech == 'cable',
        max_download_mbps=max_down)


# -----------------------------------------------------------------------------
# KS tests
# -----------------------------------------------------------------------------
def test_ks_examples():

    result = ks_one_tailed([1, 2, 3, 4, 5], [6, 7, 8, 9, 10], 'a_below_b')
    assert result.d_statistic == pytest.approx(1.0)
    assert result.p_value == pytest.approx(numpy.exp(-5.0))
    assert result.reject
    result = ks_one_tailed([1, 2, 3, 4, 5], [6, 7, 8, 9, 10], 'a_above_b')
    assert result.d_statistic == 0.0
    assert result.p_value == 1.0
    assert not result.reject

    same = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    assert ks_one_tailed(same, same).d_statistic == 0.0
    assert ks_two_sided(same, same).p_value == 1.0
    assert ks_two_sided([1, 2, 3, 4, 5], [6, 7, 8, 9, 10]).d_statistic == 1.0

    with pytest.raises(SampleTooSmall):
        ks_one_tailed([1, 2, 3, 4], [1, 2, 3, 4, 5])
    #end
    with pytest.raises(ValueError):
        ks_one_tailed(same, same, 'a_beside_b')
    #end
    assert ks_one_tailed([1, 2], [3, 4], min_sample=2).to_dict()['n1'] == 2


def test_ks_statistic_matches_sweep():

    rng = numpy.random.default_rng(5)
    for trial in range(500):
        a = rng.normal(0, 1, size=int(rng.integers(5, 101))).round(1)
        b = rng.normal(0.3, 1, size=int(rng.integers(5, 101))).round(1)
        assert ks_one_tailed(a, b, 'a_below_b').d_statistic == pytest.approx(sweep(a, b))
        assert ks_one_tailed(a, b, 'a_above_b').d_statistic == pytest.approx(sweep(b, a))
        assert ks_two_sided(a, b).d_statistic == pytest.approx(max(sweep(a, b), sweep(b, a)))
    #end


def test_ks_calibration_under_null():

    rng = numpy.random.default_rng(11)
    trials = 500
    rejected = 0
    for trial in range(trials):
        a = rng.uniform(0, 20, size=200)
        b = rng.uniform(0, 20, size=200)
        rejected += int(ks_one_tailed(a, b, 'a_below_b').reject)
    #end
    assert rejected / float(trials) <= 0.07


def test_ks_agrees_with_scipy():

    stats = pytest.importorskip('scipy.stats')
    rng = numpy.random.default_rng(9)
    a = rng.normal(0, 1, size=60)
    b = rng.normal(0.5, 1, size=50)
    # scipy's 'greater' is the ECDF of the first sample lying above the second
    assert ks_one_tailed(a, b, 'a_below_b').d_statistic == pytest.approx(stats.ks_2samp(a, b, alternative='greater').statistic)
    assert ks_one_tailed(a, b, 'a_above_b').d_statistic == pytest.approx(stats.ks_2samp(a, b, alternative='less').statistic)
    expected = stats.ks_2samp(a, b, alternative='two-sided', method='asymp')
    result = ks_two_sided(a, b)
    assert result.d_statistic == pytest.approx(expected.statistic)
    assert result.p_value == pytest.approx(expected.pvalue, abs=0.05)


# -----------------------------------------------------------------------------
# competition
# -----------------------------------------------------------------------------
def test_classify_competition():

    cable = summary('Cox', 'cable')
    assert classify_competition([cable])[0] == CompetitionMode.CABLE_MONOPOLY
    assert classify_competition([cable, summary('AT&T', 'dsl')])[0] == CompetitionMode.CABLE_DSL_DUOPOLY
    assert classify_competition([cable, summary('AT&T', 'fiber')])[0] == CompetitionMode.CABLE_FIBER_DUOPOLY
    mode, chosen = classify_competition([summary('AT&T', 'dsl', max_down=1000), cable])
    assert mode == CompetitionMode.CABLE_DSL_DUOPOLY
    assert chosen is cable
    assert classify_competition([summary('AT&T', 'dsl', max_down=1000), cable], 500)[0] == CompetitionMode.CABLE_FIBER_DUOPOLY
    assert classify_competition([summary('AT&T', 'dsl', max_down=100), cable], 500)[0] == CompetitionMode.CABLE_DSL_DUOPOLY
    with pytest.raises(NoCablePresence):
        classify_competition([summary('AT&T', 'fiber')])
    #end
    with pytest.raises(MultipleCableISPs):
        classify_competition([cable, summary('Spectrum', 'cable')])
    #end


def test_planted_competition_effect():

    results = competition_effect(summarize_block_groups(competition_city()))
    assert list(results.keys()) == ['Cox']
    result = results['Cox']
    assert result.medians[CompetitionMode.CABLE_MONOPOLY] == pytest.approx(PLANTED_MONOPOLY_MEDIAN, abs=0.01)
    assert result.medians[CompetitionMode.CABLE_FIBER_DUOPOLY] == pytest.approx(PLANTED_DUOPOLY_MEDIAN, abs=0.01)

    below, above = result.tests[CompetitionMode.CABLE_FIBER_DUOPOLY]
    assert below.d_statistic == pytest.approx(PLANTED_D, abs=0.05)
    assert below.reject
    assert not above.reject

    below, above = result.tests[CompetitionMode.CABLE_DSL_DUOPOLY]
    assert not below.reject
    assert not above.reject
    assert result.medians[CompetitionMode.CABLE_DSL_DUOPOLY] == pytest.approx(PLANTED_MONOPOLY_MEDIAN, abs=0.01)


def test_competition_coverage():

    summaries = summarize_block_groups(competition_city(n=4))
    with pytest.raises(InsufficientModeCoverage):
        competition_effect(summaries)
    #end
    results = competition_effect(summaries, min_groups=4)
    assert len(results['Cox'].tests) == 2

    with pytest.raises(NoCablePresence):
        competition_effect([summary('AT&T', 'fiber')])
    #end

    # pruning keeps values at or below the quantile in every mode
    results = competition_effect(summarize_block_groups(competition_city()), prune_quantile=0.9)
    assert len(results['Cox'].samples[CompetitionMode.CABLE_MONOPOLY]) == 36


# -----------------------------------------------------------------------------
# income
# -----------------------------------------------------------------------------
def fiber_flags(records):

    return dict((s.geoid, s.has_fiber) for s in summarize_block_groups(records))


def test_income_groups():

    income = {'a':10.0, 'b':20.0, 'c':30.0, 'd':40.0, 'e':50.0}
    groups = income_groups(['a', 'b', 'c', 'd', 'e', 'x'], income)
    assert groups.median_income == 30.0
    assert groups.low == set(['a', 'b'])
    assert groups.high == set(['c', 'd', 'e'])
    with pytest.raises(NoIncomeData):
        income_groups(['a', 'x'], income)
    #end


def test_planted_income_gap():

    records, income = income_city()
    flags = fiber_flags(records)
    gap = income_fiber_gap(sorted(flags.keys()), income, flags)
    assert (gap.pct_low, gap.pct_high) == (41.0, 57.0)
    assert gap.gap == pytest.approx(16.0)
    assert (gap.n_low, gap.n_high) == (100, 100)

    records, income = income_city(fiber_low=30, fiber_high=30)
    flags = fiber_flags(records)
    assert income_fiber_gap(sorted(flags.keys()), income, flags).gap == 0.0

    records, income = income_city(fiber_low=0, fiber_high=100)
    flags = fiber_flags(records)
    dsl = dict((s.geoid, s.has_dsl) for s in summarize_block_groups(records))
    gap = income_fiber_gap(sorted(flags.keys()), income, flags, dsl)
    assert gap.gap == 100.0
    assert (gap.dsl_pct_low, gap.dsl_pct_high) == (100.0, 0.0)


def test_income_gap_single_group():

    income = {'a':10.0, 'b':10.0, 'c':10.0}
    with pytest.raises(SingleGroupOnly):
        income_fiber_gap(['a', 'b', 'c'], income, {'a':True, 'b':False, 'c':True})
    #end


def test_income_split_uses_city_median():

    # the ISP serves only the three richest block groups of the city
    income = dict(('g%d' %(i), 10.0*(i + 1)) for i in range(6))
    fiber = {'g3':True, 'g4':False, 'g5':True}
    gap = income_fiber_gap(sorted(income.keys()), income, fiber)
    assert (gap.n_low, gap.n_high) == (3, 3)
    assert gap.pct_low == 0.0
    assert gap.pct_high == pytest.approx(200.0/3)
    assert gap.gap == pytest.approx(200.0/3)
