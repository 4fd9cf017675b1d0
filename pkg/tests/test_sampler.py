#!/usr/bin/env python

import json
from collections import Counter

import pytest
from shapely.geometry import box, mapping

from pyBroadband.pyBroadband_error import MalformedHeader, ConflictingDuplicate, AsymmetryAfterClose, FileMissing, \
    EmptyBlockGroup
from pyBroadband.pyBroadband_spatial import AdjacencyGraph
from pyBroadband.pyBroadband_sampler import RowReport, load_addresses, load_income, load_adjacency, sample_size, \
    sample_block_group, build_sample_plan, build_block_groups, ADDRESS_COLUMNS

from conftest import make_addresses


def write(tmp_path, name, text):

    path = tmp_path / name
    path.write_text(text)

    return str(path)


def grid_geoid(row, col):

    return '2207100100%d%d' %(row, col)


# -----------------------------------------------------------------------------
# addresses
# -----------------------------------------------------------------------------
def test_load_addresses_rejects_rows(tmp_path):

    text = 'address_id,street,unit,city,state,zip,block_group_id\n' \
        'a1,100 Main St,,New Orleans,LA,70115,220710017001\n' \
        'a2,102 Main St,3,New Orleans,la,70115,220710017001\n' \
        'a3,104 Main St,,New Orleans,LA,7011,220710017001\n' \
        'a4,,,New Orleans,LA,70115,220710017001\n' \
        'a2,106 Main St,,New Orleans,LA,70115,220710017001\n'
    report = RowReport('addresses.csv')
    addresses = load_addresses(write(tmp_path, 'addresses.csv', text), report)
    assert [address.address_id for address in addresses] == ['a1', 'a2']
    assert addresses[1].unit == '3'
    assert addresses[1].state == 'LA'
    assert addresses[0].unit is None
    assert [row for row, reason in report.rejected] == [4, 5, 6]
    assert 'duplicate' in report.rejected[-1][1]
    assert report.accepted == 2


def test_load_addresses_header(tmp_path):

    with pytest.raises(MalformedHeader):
        load_addresses(write(tmp_path, 'bad.csv', 'id,street\n1,100 Main St\n'))
    #end
    with pytest.raises(FileMissing):
        load_addresses(str(tmp_path / 'absent.csv'))
    #end
    # the unit column is optional
    text = 'address_id,street,city,state,zip,block_group_id\na1,100 Main St,Wichita,KS,67202,201730001001\n'
    assert len(load_addresses(write(tmp_path, 'nounit.csv', text))) == 1


def test_load_income(tmp_path):

    text = 'block_group_id,median_household_income\n' \
        '220710017001,41000\n' \
        '220710017002,-5\n' \
        '220710017003,n/a\n' \
        '2207100170,50000\n' \
        '220710017001,41000\n'
    report = RowReport('income.csv')
    income = load_income(write(tmp_path, 'income.csv', text), report)
    assert income == {'220710017001':41000.0}
    assert len(report.rejected) == 3

    text = 'block_group_id,median_household_income\n220710017001,41000\n220710017001,42000\n'
    with pytest.raises(ConflictingDuplicate):
        load_income(write(tmp_path, 'conflict.csv', text))
    #end


# -----------------------------------------------------------------------------
# adjacency
# -----------------------------------------------------------------------------
def test_edge_list_is_symmetrized(tmp_path):

    text = 'geoid_a,geoid_b\nA,B\nB,C\nC,C\nD,\n'
    graph = load_adjacency(write(tmp_path, 'edges.csv', text))
    assert graph.is_symmetric()
    assert graph.neighbors('B') == ['A', 'C']
    assert graph.neighbors('A') == ['B']
    assert graph.neighbors('C') == ['B']
    assert graph.isolated() == ['D']
    assert graph.n_edges() == 2


def test_strict_edge_list(tmp_path):

    path = write(tmp_path, 'edges.csv', 'geoid_a,geoid_b\nA,B\nB,A\nB,C\n')
    with pytest.raises(AsymmetryAfterClose):
        load_adjacency(path, strict=True)
    #end
    assert load_adjacency(path).n_edges() == 2
    path = write(tmp_path, 'closed.csv', 'geoid_a,geoid_b\nA,B\nB,A\n')
    assert load_adjacency(path, strict=True).n_edges() == 1


def test_polygons_use_queen_contiguity(tmp_path):

    features = []
    for row in range(3):
        for col in range(3):
            features.append({'type':'Feature', 'properties':{'GEOID':grid_geoid(row, col)},
                'geometry':mapping(box(col, row, col + 1, row + 1))})
        #end
    #end
    path = write(tmp_path, 'bg.geojson', json.dumps({'type':'FeatureCollection', 'features':features}))
    graph = load_adjacency(path)
    assert len(graph.nodes) == 9
    degrees = dict((node, len(graph.neighbors(node))) for node in graph.nodes)
    for corner in (grid_geoid(0, 0), grid_geoid(0, 2), grid_geoid(2, 0), grid_geoid(2, 2)):
        assert degrees[corner] == 3
    #end
    assert degrees[grid_geoid(1, 1)] == 8
    assert degrees[grid_geoid(0, 1)] == 5
    assert graph.is_symmetric()


def test_corrupt_polygon_file(tmp_path):

    with pytest.raises(MalformedHeader):
        load_adjacency(write(tmp_path, 'bg.geojson', '{"type": "FeatureCollection", "features": ['))
    #end
    with pytest.raises(MalformedHeader):
        load_adjacency(write(tmp_path, 'list.json', '[1, 2, 3]'))
    #end
    feature = {'type':'Feature', 'properties':{'GEOID':grid_geoid(0, 0)}}
    path = write(tmp_path, 'nogeom.geojson', json.dumps({'type':'FeatureCollection', 'features':[feature]}))
    with pytest.raises(MalformedHeader):
        load_adjacency(path)
    #end


def test_asymmetric_graph_is_rejected(tmp_path, monkeypatch):

    path = write(tmp_path, 'edges.csv', 'geoid_a,geoid_b\n220710017001,220710017002\n')
    monkeypatch.setattr(AdjacencyGraph, 'is_symmetric', lambda self: False)
    with pytest.raises(AsymmetryAfterClose):
        load_adjacency(path)
    #end


def test_block_groups(tmp_path):

    addresses = make_addresses(4) + make_addresses(2, geoid='220710017002', start=300)
    graph = load_adjacency(write(tmp_path, 'edges.csv', 'geoid_a,geoid_b\n220710017001,220710017002\n'))
    groups = build_block_groups(addresses, {'220710017001':41000.0}, graph)
    assert len(groups['220710017001'].addresses) == 4
    assert groups['220710017001'].neighbors == ['220710017002']
    assert groups['220710017002'].median_household_income_usd is None


# -----------------------------------------------------------------------------
# sampling
# -----------------------------------------------------------------------------
def test_sample_sizes():

    assert sample_size(1000) == 100
    assert sample_size(120) == 30
    assert sample_size(25) == 25
    assert sample_size(301) == 31
    assert sample_size(50, rate=1.0) == 50


def test_sample_block_group():

    addresses = make_addresses(1000)
    chosen = sample_block_group(addresses, seed=3)
    assert len(chosen) == 100
    assert len(set([address.address_id for address in chosen])) == 100
    assert chosen == sample_block_group(addresses, seed=3)
    assert len(sample_block_group(addresses[:120])) == 30
    assert len(sample_block_group(addresses[:25])) == 25
    with pytest.raises(EmptyBlockGroup):
        sample_block_group([])
    #end
    with pytest.raises(ValueError):
        sample_block_group(addresses, rate=0.0)
    #end


def test_inclusion_is_uniform():

    addresses = make_addresses(40)
    counts = Counter()
    trials = 2000
    for seed in range(trials):
        for address in sample_block_group(addresses, rate=0.1, floor=10, seed=seed):
            counts[address.address_id] += 1
        #end
    #end
    for address in addresses:
        assert abs(counts[address.address_id]/float(trials) - 0.25) < 0.05
    #end


def test_sample_plan(tmp_path):

    addresses = make_addresses(200) + make_addresses(20, geoid='220710017002', start=900)
    plan = build_sample_plan(addresses, seed=1)
    assert len(plan.address_ids('220710017001')) == 30
    assert len(plan.address_ids('220710017002')) == 20
    # input order does not matter
    again = build_sample_plan(list(reversed(addresses)), seed=1)
    assert plan.address_ids('220710017001') == again.address_ids('220710017001')
    assert plan.address_ids('220710017001') != build_sample_plan(addresses, seed=2).address_ids('220710017001')

    path = str(tmp_path / 'targets.csv')
    plan.write(path)
    loaded = load_addresses(path)
    assert [address.address_id for address in loaded] == [address.address_id for address in plan.addresses()]
    assert 'Total' in str(plan)
