#!/usr/bin/env python

import pytest

from pyBroadband.pyBroadband_adapter import AdapterSpec, TemplateKind, PRIORITY, load_adapters, marker, ADAPTERS_DIR
from pyBroadband.pyBroadband_error import InvalidAdapter, FileMissing


def patterns(isp='Test'):

    return dict((kind.value, marker(isp, kind)) for kind in PRIORITY)


def table(ms=1000):

    return dict((kind.value, ms) for kind in TemplateKind)


def test_shipped_adapters(adapters):

    assert sorted(adapters.keys()) == ['AT&T', 'CenturyLink', 'Cox', 'Frontier', 'Spectrum', 'Verizon', 'Xfinity']
    assert adapters['AT&T'].timing_table[TemplateKind.PLANS_PAGE] == 30000
    assert adapters['Spectrum'].timing_table[TemplateKind.PLANS_PAGE] == 60000
    for adapter in adapters.values():
        assert adapter.max_steps == 8
        for kind in PRIORITY:
            assert len(adapter.patterns[kind]) >= 1
        #end
        assert set(adapter.timing_table.keys()) == set(TemplateKind)
    #end


def test_every_kind_needs_a_pattern():

    values = patterns()
    del values['Blocked']
    with pytest.raises(InvalidAdapter):
        AdapterSpec('Test', values, table())
    #end


def test_timing_and_step_budget_checks():

    with pytest.raises(InvalidAdapter):
        AdapterSpec('Test', patterns(), table(0))
    #end
    with pytest.raises(InvalidAdapter):
        AdapterSpec('Test', patterns(), table(), max_steps=2)
    #end
    partial = table()
    del partial['Unknown']
    with pytest.raises(InvalidAdapter):
        AdapterSpec('Test', patterns(), partial)
    #end


def test_bad_pattern_and_kind():

    values = patterns()
    values['PlansPage'] = '(unclosed'
    with pytest.raises(InvalidAdapter):
        AdapterSpec('Test', values, table())
    #end
    values = patterns()
    values['Landing'] = 'x'
    with pytest.raises(InvalidAdapter):
        AdapterSpec('Test', values, table())
    #end


def test_load_yaml(tmp_path):

    path = tmp_path / 'test.yaml'
    path.write_text('''
isp_name: Test
max_steps: 5
default_wait_ms: 2000
timing_table_ms:
  PlansPage: 9000
patterns:
  PlansPage: 'data-bat="test:plans-grid"'
  IncorrectAddress: 'data-bat="test:address-suggestions"'
  MultiDwellingUnit: 'data-bat="test:unit-select"'
  ExistingCustomer: 'data-bat="test:existing-customer"'
  Unserviceable: ['data-bat="test:no-service"', '(?i)no service']
  Blocked: 'data-bat="test:blocked"'
''', encoding='utf-8')
    adapter = AdapterSpec.load(str(path))
    assert adapter.isp_name == 'Test'
    assert adapter.max_steps == 5
    assert adapter.timing_table[TemplateKind.PLANS_PAGE] == 9000
    assert adapter.timing_table[TemplateKind.BLOCKED] == 2000
    assert len(adapter.patterns[TemplateKind.UNSERVICEABLE]) == 2
    assert 'Max Steps: 5' in str(adapter)


def test_load_errors(tmp_path):

    with pytest.raises(FileMissing):
        AdapterSpec.load(str(tmp_path / 'missing.yaml'))
    #end
    path = tmp_path / 'bad.yaml'
    path.write_text('isp_name: Test\n', encoding='utf-8')
    with pytest.raises(InvalidAdapter):
        AdapterSpec.load(str(path))
    #end
    with pytest.raises(InvalidAdapter):
        load_adapters([ADAPTERS_DIR, ADAPTERS_DIR])
    #end
