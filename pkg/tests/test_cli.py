#!/usr/bin/env python

import os
import argparse

import pytest

from pyBroadband.pyBroadband_cli import main, worker_counts, EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL
from pyBroadband.pyBroadband_history import read_dataset
from pyBroadband.pySIM.pySIM import SCENARIOS_DIR

from conftest import make_addresses


@pytest.fixture(scope='module')
def fixture_dir(tmp_path_factory):

    directory = str(tmp_path_factory.mktemp('cli_fixture'))
    assert main(['fixture', '--out', directory]) == EXIT_OK

    return directory


def test_worker_counts():

    assert worker_counts('1,10, 50') == [1, 10, 50]
    for text in ('', 'a,b'):
        with pytest.raises(argparse.ArgumentTypeError):
            worker_counts(text)
        #end
    #end


def test_missing_subcommand():

    with pytest.raises(SystemExit):
        main([])
    #end


def test_fixture_and_analyze(fixture_dir, tmp_path):

    for name in ('addresses.csv', 'income.csv', 'adjacency.geojson', 'dataset.jsonl'):
        assert os.path.isfile(os.path.join(fixture_dir, name))
    #end
    out = str(tmp_path / 'analysis')
    assert main(['analyze', '--dataset', os.path.join(fixture_dir, 'dataset.jsonl'),
        '--income', os.path.join(fixture_dir, 'income.csv'),
        '--adjacency', os.path.join(fixture_dir, 'adjacency.geojson'),
        '--out', out, '--permutations', '19']) == EXIT_OK
    assert os.path.isfile(os.path.join(out, 'summaries.csv'))
    assert main(['analyze', '--dataset', str(tmp_path / 'absent.jsonl'), '--income', 'x', '--adjacency', 'y',
        '--out', out]) == EXIT_CONFIG


def test_release(fixture_dir, tmp_path, monkeypatch):

    dataset = os.path.join(fixture_dir, 'dataset.jsonl')
    out = str(tmp_path / 'public.jsonl')
    monkeypatch.setenv('PYBB_TEST_SALT', 's'*32)
    assert main(['release', '--dataset', dataset, '--salt-env', 'PYBB_TEST_SALT', '--out', out]) == EXIT_OK
    assert len(read_dataset(out)) == len(read_dataset(dataset))

    monkeypatch.delenv('PYBB_TEST_SALT')
    assert main(['release', '--dataset', dataset, '--salt-env', 'PYBB_TEST_SALT', '--out', out]) == EXIT_CONFIG
    monkeypatch.setenv('PYBB_TEST_SALT', 'short')
    assert main(['release', '--dataset', dataset, '--salt-env', 'PYBB_TEST_SALT', '--out', out]) == EXIT_CONFIG


def test_sample(fixture_dir, tmp_path):

    out = str(tmp_path / 'targets.csv')
    assert main(['sample', '--addresses', os.path.join(fixture_dir, 'addresses.csv'), '--out', out]) == EXIT_OK
    assert os.path.isfile(out)
    assert main(['sample', '--addresses', str(tmp_path / 'absent.csv')]) == EXIT_CONFIG


def crawl_yaml(tmp_path, targets_csv, isps):

    targets_csv(make_addresses(5))
    path = tmp_path / 'crawl.yaml'
    path.write_text('targets: targets.csv\nworkers: 5\nper_host_rate: 1000000\noutput_path: out/dataset.jsonl\n'
        'isps: [%s]\nscenarios: [%s]\n' %(', '.join(isps), os.path.join(SCENARIOS_DIR, 'att.yaml')))

    return str(path)


def test_crawl_exit_codes(tmp_path, targets_csv):

    config = crawl_yaml(tmp_path, targets_csv, ['AT&T'])
    assert main(['crawl', '--config', config]) == EXIT_OK
    assert len(read_dataset(str(tmp_path / 'out' / 'dataset.jsonl'))) == 5

    # no simulator serves Cox, so those sessions fail in transport
    (tmp_path / 'out' / 'dataset.jsonl').unlink()
    config = crawl_yaml(tmp_path, targets_csv, ['AT&T', 'Cox'])
    assert main(['crawl', '--config', config]) == EXIT_PARTIAL

    assert main(['crawl', '--config', str(tmp_path / 'absent.yaml')]) == EXIT_CONFIG
    config = crawl_yaml(tmp_path, targets_csv, ['Starlink'])
    assert main(['crawl', '--config', config]) == EXIT_CONFIG
