#!/usr/bin/env python

import numpy
import pytest

from pyBroadband.pyBroadband_error import NonPositiveInput, EmptyPlans, EmptyInput, ZeroMean, OutOfRange
from pyBroadband.pyBroadband_history import DatasetRecord
from pyBroadband.pyBroadband_metrics import carriage_value, plan_cv, best_cv, block_group_median_cv, \
    coefficient_of_variation, PlanVector, plan_vector, l1_distance, pairwise_l1, intra_city_spread, \
    summarize_block_groups, summaries_frame, plan_vectors_frame, N_BINS, SUMMARY_COLUMNS
from pyBroadband.pyBroadband_plan import Plan


def record(i, geoid, plans, isp='AT&T', status='Hit'):

    return DatasetRecord('a%04d' %(i), geoid, 'New Orleans', isp, status, plans=plans, timestamp=0.0,
        reason='blocked' if status == 'Miss' else None)


def test_carriage_value():

    assert carriage_value(1000, 80) == pytest.approx(12.5)
    assert carriage_value(50, 55) == pytest.approx(0.909, abs=1e-3)
    for speed, price in ((0, 50), (100, 0), (-1, 50)):
        with pytest.raises(NonPositiveInput):
            carriage_value(speed, price)
        #end
    #end


def test_best_cv():

    plans = [Plan(1000, 1000, 80, 'fiber'), Plan(300, 300, 55, 'fiber')]
    assert best_cv(plans) == pytest.approx(12.5)
    assert best_cv([Plan(300, 20, 50, 'cable'), Plan(100, 10, 20, 'cable')]) == pytest.approx(6.0)
    assert best_cv([Plan(300, 20, 50, 'cable'), Plan(100, 30, 20, 'cable')], basis='upload') == pytest.approx(1.5)
    assert plan_cv(plans[0], 'upload') == pytest.approx(12.5)
    with pytest.raises(EmptyPlans):
        best_cv([])
    #end
    with pytest.raises(ValueError):
        plan_cv(plans[0], 'latency')
    #end


def test_block_group_median_and_cov():

    assert block_group_median_cv([12.5, 0.909, 12.5, 11.8, 0.909]) == pytest.approx(11.8)
    assert block_group_median_cv([1.0, 2.0, 3.0, 4.0]) == pytest.approx(2.5)
    assert coefficient_of_variation([0.5, 0.5, 12.5, 12.5]) == pytest.approx(0.923, abs=1e-3)
    assert coefficient_of_variation([3.0, 3.0, 3.0]) == 0.0
    with pytest.raises(EmptyInput):
        block_group_median_cv([])
    #end
    with pytest.raises(ZeroMean):
        coefficient_of_variation([0.0, 0.0])
    #end


def test_plan_vector():

    vector = plan_vector([0.4, 0.909, 1.0, 1.01, 12.5, 30.0])
    assert vector.weights.sum() == pytest.approx(1.0)
    assert vector.weights[0] == pytest.approx(3/6.0)
    assert vector.weights[1] == pytest.approx(1/6.0)
    assert vector.weights[12] == pytest.approx(1/6.0)
    assert vector.weights[29] == pytest.approx(1/6.0)
    assert len(vector.weights) == N_BINS
    for values in ([0.0], [30.5], [-1.0]):
        with pytest.raises(OutOfRange):
            plan_vector(values)
        #end
    #end
    with pytest.raises(EmptyInput):
        plan_vector([])
    #end


def test_l1_is_a_metric():

    rng = numpy.random.default_rng(0)
    vectors = [plan_vector(rng.uniform(0.1, 30.0, size=rng.integers(1, 40))) for i in range(30)]
    for a in vectors:
        assert l1_distance(a, a) == 0.0
        for b in vectors:
            d = l1_distance(a, b)
            assert 0.0 <= d <= 2.0 + 1e-12
            assert d == pytest.approx(l1_distance(b, a))
            for c in vectors[:5]:
                assert d <= l1_distance(a, c) + l1_distance(c, b) + 1e-12
            #end
        #end
    #end
    # disjoint supports sit at the maximum
    assert l1_distance(plan_vector([1.0]), plan_vector([20.0])) == pytest.approx(2.0)


def test_pairwise_l1():

    vectors = {'Wichita':plan_vector([1.0, 2.0]), 'New Orleans':plan_vector([1.0, 12.0]), 'Billings':plan_vector([1.0, 2.0])}
    frame = pairwise_l1(vectors)
    assert list(frame.index) == ['Billings', 'New Orleans', 'Wichita']
    assert frame.loc['Billings', 'Wichita'] == 0.0
    assert frame.loc['Wichita', 'New Orleans'] == pytest.approx(1.0)
    assert frame.loc['New Orleans', 'Wichita'] == frame.loc['Wichita', 'New Orleans']


def test_intra_city_spread():

    assert intra_city_spread([2.0, 3.0, 5.0]) == pytest.approx(150.0)
    assert intra_city_spread([4.0]) == 0.0
    with pytest.raises(NonPositiveInput):
        intra_city_spread([0.0, 1.0])
    #end


def test_summaries():

    fiber = [Plan(1000, 1000, 80, 'fiber')]
    dsl = [Plan(50, 10, 55, 'dsl'), Plan(10, 1, 55, 'dsl')]
    records = [record(0, '220710017001', fiber), record(1, '220710017001', fiber), record(2, '220710017001', dsl),
        record(3, '220710017001', [], status='Miss'), record(4, '220710017002', dsl),
        record(5, '220710017002', [Plan(300, 20, 50, 'cable')], isp='Cox')]
    summaries = summarize_block_groups(records)
    assert [(s.isp, s.geoid) for s in summaries] == [('AT&T','220710017001'), ('AT&T','220710017002'), ('Cox','220710017002')]
    first = summaries[0]
    assert first.n_addresses == 3
    assert first.median_best_cv == pytest.approx(12.5)
    assert first.cov == pytest.approx(coefficient_of_variation([12.5, 12.5, 50/55.0]))
    assert (first.has_fiber, first.has_dsl, first.has_cable) == (True, True, False)
    assert first.max_download_mbps == 1000
    assert first.city == 'New Orleans'

    frame = summaries_frame(summaries)
    assert list(frame.columns) == SUMMARY_COLUMNS + ['city']
    assert len(frame) == 3

    frame = plan_vectors_frame([plan_vector([12.5], isp='AT&T', city='New Orleans')])
    assert frame.loc[0, 'bin_13'] == 1.0
    assert frame.shape == (1, N_BINS + 2)


def test_upload_basis_keeps_block_group_order():

    fiber = [Plan(1000, 1000, 80, 'fiber')]
    dsl = [Plan(50, 10, 55, 'dsl'), Plan(10, 1, 55, 'dsl')]
    records = [record(0, '220710017001', fiber), record(1, '220710017001', fiber), record(2, '220710017001', dsl),
        record(3, '220710017002', dsl), record(4, '220710017002', dsl),
        record(5, '220710017002', [Plan(300, 20, 50, 'cable')], isp='Cox')]
    by_download = summarize_block_groups(records)
    by_upload = summarize_block_groups(records, basis='upload')
    assert [s.median_best_cv for s in by_upload] == pytest.approx([12.5, 10/55.0, 0.4])

    # symmetric fiber keeps its value, asymmetric plans drop, the ranking holds
    rank = lambda summaries: sorted(range(len(summaries)), key=lambda i: summaries[i].median_best_cv)
    assert rank(by_upload) == rank(by_download)
    assert by_upload[0].median_best_cv == by_download[0].median_best_cv
    for down, up in zip(by_download[1:], by_upload[1:]):
        assert up.median_best_cv < down.median_best_cv
    #end


def test_plan_vector_validation():

    with pytest.raises(ValueError):
        PlanVector(numpy.ones(10))
    #end
    with pytest.raises(ValueError):
        PlanVector(-numpy.ones(N_BINS))
    #end
