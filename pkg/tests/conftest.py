#!/usr/bin/env python

import os, sys
import asyncio

import pytest

from pyBroadband.pyBroadband_address import Address
from pyBroadband.pyBroadband_adapter import AdapterSpec, TemplateKind, load_adapters, ADAPTERS_DIR
from pyBroadband.pyBroadband_crawler import CrawlConfig
from pyBroadband.pySIM.simulator import SimScenario
from pyBroadband.pySIM.pySIM import build_fleet, SimTransport
from pyBroadband.pyBroadband_synthetic import three_city_fixture


FIBER_PLANS = [[1000, 1000, 80, 'fiber'], [500, 500, 65, 'fiber'], [300, 300, 55, 'fiber']]


def make_addresses(n, geoid='220710017001', zip='70115', city='New Orleans', state='LA', suffix='Avenue', start=100):

    return [Address('a%04d' %(i), '%d Main %s' %(start + 2*i, suffix), city, state, zip, geoid) for i in range(n)]


def make_scenario(isp_name='AT&T', noise=None, latency=None, addresses=None, seed=0, **kwargs):

    if latency is None:
        latency = dict((kind.value, 1) for kind in TemplateKind)
    #end
    scenario = SimScenario(isp_name, {'fiber':{'weight':1.0, 'plans':FIBER_PLANS}}, noise=noise,
        latency=latency, p_deviate=0.0, **kwargs)
    if addresses is not None:
        scenario.with_truth(addresses, seed)
    #end

    return scenario


def run(coro):

    return asyncio.run(coro)


@pytest.fixture(scope='session')
def adapters():

    return dict((adapter.isp_name, adapter) for adapter in load_adapters([ADAPTERS_DIR]))


@pytest.fixture
def att_adapter():

    return AdapterSpec.default('AT&T', timing_table={'PlansPage':2000, 'IncorrectAddress':2000,
        'MultiDwellingUnit':2000, 'ExistingCustomer':2000, 'Unserviceable':2000, 'Blocked':2000, 'Unknown':2000})


@pytest.fixture
def addresses():

    return make_addresses(20)


@pytest.fixture
def clean_fleet(addresses):

    return build_fleet([make_scenario(addresses=addresses)])


@pytest.fixture
def sim_transport(clean_fleet):

    return SimTransport(clean_fleet)


@pytest.fixture(scope='session')
def small_cities():

    return three_city_fixture(seed=0, rows=4, cols=4, per_group=6)


@pytest.fixture
def targets_csv(tmp_path):

    from pyBroadband.pyBroadband_sampler import ADDRESS_COLUMNS
    import pandas

    def write(addresses, name='targets.csv'):
        path = str(tmp_path / name)
        frame = pandas.DataFrame([address.to_dict() for address in addresses], columns=ADDRESS_COLUMNS)
        frame['unit'] = frame['unit'].fillna('')
        frame.to_csv(path, index=False)
        return path

    return write


def crawl_config(tmp_path, targets, **options):

    values = {'targets':targets, 'output_path':str(tmp_path / 'dataset.jsonl'), 'per_host_rate':1e6,
        'workers':10, 'isps':['AT&T']}
    values.update(options)

    return CrawlConfig(options=values)
