#!/usr/bin/env python

import pytest

from pyBroadband.pyBroadband_options import Options
from pyBroadband.pyBroadband_crawler import CrawlConfig, crawl_pairs, run_crawl, scale_experiment, ScaleReport, \
    quantize, MAX_WORKERS
from pyBroadband.pyBroadband_error import ConfigInvalid, FileMissing, FleetUnavailable
from pyBroadband.pyBroadband_history import read_dataset
from pyBroadband.pyBroadband_session import OutcomeStatus, read_transcripts
from pyBroadband.pySIM.pySIM import build_fleet, load_scenarios

from conftest import make_addresses, make_scenario, crawl_config


NOISE = {'p_incorrect_address':0.2, 'p_mdu':0.1, 'p_existing_customer':0.1, 'p_blocked':0.05}


def noisy_fleet(addresses, **kwargs):

    return build_fleet([make_scenario(addresses=addresses, noise=NOISE, p_unrecoverable=0.2, p_unserviceable=0.05,
        **kwargs)])


def content(path):

    return sorted([record.content_key() for record in read_dataset(path)])


# -----------------------------------------------------------------------------
# configuration
# -----------------------------------------------------------------------------
def test_config_validation(tmp_path):

    config = CrawlConfig()
    assert config.getOption('workers') == 50
    for name, value in (('workers', 0), ('workers', MAX_WORKERS + 1), ('per_host_rate', 0.0),
            ('transport', 'ftp'), ('workers', '10'), ('retries', 3)):
        with pytest.raises(ConfigInvalid):
            config.setOption(name, value)
        #end
    #end
    # failed sets keep the previous values
    assert config.getOption('workers') == 50
    assert config.getOption('per_host_rate') == 60.0
    assert config.getOption('transport') == 'sim'
    config.setOption('per_host_rate', 30)
    assert config.getOption('per_host_rate') == 30.0

    with pytest.raises(ConfigInvalid):
        CrawlConfig().load_targets()
    #end
    with pytest.raises(ConfigInvalid):
        crawl_config(tmp_path, 'x.csv', isps=['Starlink']).load_adapters()
    #end
    assert [a.isp_name for a in crawl_config(tmp_path, 'x.csv', isps=['Cox', 'AT&T']).load_adapters()] == ['AT&T', 'Cox']


def test_options_base_defaults():

    options = Options()
    assert options.name == ''
    with pytest.raises(ConfigInvalid):
        options.setOption('workers', 1)
    #end


def test_config_from_yaml(tmp_path, targets_csv):

    targets_csv(make_addresses(3))
    path = tmp_path / 'crawl.yaml'
    path.write_text('targets: targets.csv\nworkers: 4\nisps: [AT&T]\noutput_path: out/dataset.jsonl\n')
    config = CrawlConfig.load(str(path))
    assert config.getOption('workers') == 4
    assert len(config.load_targets()) == 3
    assert config.transcripts_path() == str(tmp_path / 'out' / 'dataset_transcripts.jsonl')
    with pytest.raises(FileMissing):
        CrawlConfig.load(str(tmp_path / 'absent.yaml'))
    #end
    path.write_text('workers: [1, 2]\n')
    with pytest.raises(ConfigInvalid):
        CrawlConfig.load(str(path))
    #end


def test_crawl_pairs(adapters):

    addresses = make_addresses(3) + make_addresses(2, city='Billings', state='MT', zip='59101', geoid='301110001001')
    pairs = crawl_pairs(addresses, [adapters['AT&T'], adapters['Spectrum']],
        coverage={'New Orleans':['AT&T'], 'Billings':['Spectrum']})
    assert len(pairs) == 5
    pairs = crawl_pairs(addresses, [adapters['AT&T']], completed=set([('a0000', 'AT&T')]))
    assert len(pairs) == 4


# -----------------------------------------------------------------------------
# crawling
# -----------------------------------------------------------------------------
def test_crawl_matches_prediction(tmp_path, targets_csv):

    addresses = make_addresses(100)
    fleet = noisy_fleet(addresses)
    config = crawl_config(tmp_path, targets_csv(addresses), workers=10)
    summary = run_crawl(config, fleet=fleet)

    records = read_dataset(config.getOption('output_path'))
    assert len(records) == 100
    endpoint = fleet.endpoint('AT&T')
    by_id = dict((record.address_id, record) for record in records)
    for address in addresses:
        status, reason = endpoint.predict_outcome(address)
        assert (by_id[address.address_id].status, by_id[address.address_id].reason) == (status, reason)
        if status == OutcomeStatus.HIT:
            assert by_id[address.address_id].plans == endpoint.ground_truth(address)
        #end
    #end
    assert summary.peak_in_flight <= 10
    assert summary.failures() == []
    assert 0 < summary.hit_rate('AT&T') < 1
    assert 'AT&T' in str(summary)

    outcomes = read_transcripts(config.transcripts_path())
    assert len(outcomes) == 100
    assert all([len(outcome.transcript) >= 1 for outcome in outcomes])


def test_crawl_resumes_without_duplicates(tmp_path, targets_csv):

    addresses = make_addresses(60)
    fleet = noisy_fleet(addresses)

    # a crawl killed half way left the first 30 pairs
    partial = crawl_config(tmp_path, targets_csv(addresses[:30], 'half.csv'))
    run_crawl(partial, fleet=fleet)
    with open(partial.getOption('output_path'), 'a') as fid:
        fid.write('{"address_id": "a0045", "geoid"')
    #end

    config = crawl_config(tmp_path, targets_csv(addresses))
    summary = run_crawl(config, fleet=fleet)
    assert summary.skipped == 30
    assert len(summary.outcomes) == 30
    records = read_dataset(config.getOption('output_path'))
    assert len(records) == 60
    assert len(set([record.pair() for record in records])) == 60

    again = crawl_config(tmp_path, targets_csv(addresses), output_path=str(tmp_path / 'fresh.jsonl'))
    run_crawl(again, fleet=noisy_fleet(addresses))
    assert content(config.getOption('output_path')) == content(again.getOption('output_path'))


def test_worker_count_does_not_change_content(tmp_path, targets_csv):

    addresses = make_addresses(50)
    targets = targets_csv(addresses)
    one = crawl_config(tmp_path, targets, workers=1, output_path=str(tmp_path / 'one.jsonl'))
    many = crawl_config(tmp_path, targets, workers=50, output_path=str(tmp_path / 'many.jsonl'))
    run_crawl(one, fleet=noisy_fleet(addresses))
    summary = run_crawl(many, fleet=noisy_fleet(addresses))
    assert summary.peak_in_flight > 1
    assert content(str(tmp_path / 'one.jsonl')) == content(str(tmp_path / 'many.jsonl'))


def test_rate_limit_holds(tmp_path, targets_csv):

    addresses = make_addresses(30)
    config = crawl_config(tmp_path, targets_csv(addresses), workers=30, per_host_rate=20.0, window_s=0.5)
    summary = run_crawl(config, fleet=build_fleet([make_scenario(addresses=addresses)]))
    assert summary.requests['AT&T'] == 30
    assert summary.peak_rate['AT&T'] <= 20
    assert summary.elapsed_s >= 0.5
    # throttling is not part of the session time
    assert max([outcome.total_ms for outcome in summary.outcomes]) < 500.0


def test_egress_round_robin(tmp_path, targets_csv):

    addresses = make_addresses(7)
    config = crawl_config(tmp_path, targets_csv(addresses), workers=1, egress_pool=['e1', 'e2', 'e3'])
    summary = run_crawl(config, fleet=build_fleet([make_scenario(addresses=addresses)]))
    assert [outcome.egress for outcome in summary.outcomes] == ['e1', 'e2', 'e3', 'e1', 'e2', 'e3', 'e1']
    assert [record.egress for record in read_dataset(config.getOption('output_path'))] == \
        ['e1', 'e2', 'e3', 'e1', 'e2', 'e3', 'e1']


def test_unreachable_isp_is_a_failure(tmp_path, targets_csv):

    addresses = make_addresses(5)
    config = crawl_config(tmp_path, targets_csv(addresses), isps=['AT&T', 'Cox'])
    summary = run_crawl(config, fleet=build_fleet([make_scenario(addresses=addresses)]))
    assert len(summary.outcomes) == 10
    assert len(summary.failures()) == 5
    assert summary.misses() == {'transport':5}
    assert summary.hit_rate('AT&T') == 1.0


def test_resume_retries_transport_misses(tmp_path, targets_csv):

    addresses = make_addresses(5)
    config = crawl_config(tmp_path, targets_csv(addresses), isps=['AT&T', 'Cox'])
    run_crawl(config, fleet=build_fleet([make_scenario(addresses=addresses)]))

    # Cox is back up; only its pairs go out again
    fleet = build_fleet([make_scenario(addresses=addresses), make_scenario('Cox', addresses=addresses)])
    summary = run_crawl(config, fleet=fleet)
    assert summary.skipped == 5
    assert len(summary.outcomes) == 5
    assert summary.failures() == []
    assert summary.hit_rate('Cox') == 1.0
    records = read_dataset(config.getOption('output_path'))
    assert len(records) == 10
    assert set([record.status for record in records]) == set([OutcomeStatus.HIT])



def test_shipped_scenario_hit_rate(tmp_path, targets_csv):

    addresses = make_addresses(1000)
    scenario = [s for s in load_scenarios() if s.isp_name == 'AT&T'][0]
    fleet = build_fleet([scenario], seed=0, addresses=addresses)
    config = crawl_config(tmp_path, targets_csv(addresses), workers=200, transcripts=False)
    summary = run_crawl(config, fleet=fleet)
    assert 0.82 <= summary.hit_rate() <= 0.96
    # every session, finished or abandoned, is released
    assert len(fleet.endpoint('AT&T').sessions) == 0


# -----------------------------------------------------------------------------
# scaling experiment
# -----------------------------------------------------------------------------
def test_quantize():

    assert list(quantize([12.0, 26.0, 74.9, 75.1], 50.0)) == [0.0, 50.0, 50.0, 100.0]


def test_scale_without_contention(tmp_path):

    addresses = make_addresses(20)
    fleet = build_fleet([make_scenario(addresses=addresses, latency={'PlansPage':100})])
    config = crawl_config(tmp_path, 'unused.csv', resolution_ms=50.0)
    report = scale_experiment(config, [1, 20], fleet=fleet, addresses=addresses)
    assert report.worker_counts == [1, 20]
    assert report.rejections() == []
    assert report.peaks[20] == 20
    assert 'Workers' in str(report)


def test_scale_with_capacity_contention(tmp_path):

    addresses = make_addresses(50)
    fleet = build_fleet([make_scenario(addresses=addresses, latency={'PlansPage':20}, capacity=2)])
    config = crawl_config(tmp_path, 'unused.csv', resolution_ms=10.0)
    report = scale_experiment(config, [1, 50], fleet=fleet, addresses=addresses)
    assert report.rejections() == [(1, 50)]


def test_scale_edge_cases(tmp_path):

    report = ScaleReport({50:[100.0]*10}, 50.0)
    assert report.tests == {}
    assert report.rejections() == []

    addresses = make_addresses(5)
    fleet = build_fleet([make_scenario(addresses=addresses)])
    with pytest.raises(ConfigInvalid):
        scale_experiment(crawl_config(tmp_path, 'unused.csv'), [0], fleet=fleet, addresses=addresses)
    #end
    with pytest.raises(FleetUnavailable):
        scale_experiment(crawl_config(tmp_path, 'unused.csv', isps=['Cox']), [1], fleet=fleet, addresses=addresses)
    #end
