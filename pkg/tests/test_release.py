#!/usr/bin/env python

import pytest

from pyBroadband.pyBroadband_error import WeakSalt, EmptyInput
from pyBroadband.pyBroadband_history import Dataset, read_dataset
from pyBroadband.pyBroadband_release import release, release_path, release_record
from pyBroadband.pyBroadband_synthetic import three_city_fixture, fixture_records, write_fixture


SALT = 'an-example-release-salt'


@pytest.fixture
def dataset(tmp_path, small_cities):

    return write_fixture(str(tmp_path / 'fixture'), small_cities, fixture_records(small_cities))['dataset']


def test_release_keeps_counts_and_hides_addresses(tmp_path, dataset):

    output = release(dataset, SALT)
    assert output == release_path(dataset)
    private = read_dataset(dataset)
    public = read_dataset(output)
    assert len(public) == len(private)
    assert [(r.geoid, r.city, r.isp, r.status, r.best_cv) for r in public] == \
        [(r.geoid, r.city, r.isp, r.status, r.best_cv) for r in private]

    text = open(output).read()
    for record in private[:200]:
        assert record.street not in text
        assert record.address_id not in text
    #end
    assert SALT not in text
    assert all([(r.street, r.unit, r.zip, r.egress) == (None, None, None, None) for r in public])


def test_release_hash_is_deterministic(tmp_path, dataset):

    first = read_dataset(release(dataset, SALT, str(tmp_path / 'a.jsonl')))
    second = read_dataset(release(dataset, SALT, str(tmp_path / 'b.jsonl')))
    other = read_dataset(release(dataset, SALT + '-rotated', str(tmp_path / 'c.jsonl')))
    assert [r.address_id for r in first] == [r.address_id for r in second]
    assert all([a.address_id != b.address_id for a, b in zip(first, other)])
    # one hash per address, shared by every ISP record of it
    private = read_dataset(dataset)
    pairs = set([(p.address_id, r.address_id) for p, r in zip(private, first)])
    assert len(set([p for p, r in pairs])) == len(set([r for p, r in pairs]))


def test_release_refuses_weak_salt(dataset):

    for salt in ('', 'short', None, b'0123456789abcde'):
        with pytest.raises(WeakSalt):
            release(dataset, salt)
        #end
    #end


def test_release_errors(tmp_path, dataset):

    empty = str(tmp_path / 'empty.jsonl')
    Dataset(empty, 'w').close()
    with pytest.raises(EmptyInput):
        release(empty, SALT)
    #end
    public = read_dataset(release(dataset, SALT))
    with pytest.raises(ValueError):
        release_record(public[0], SALT)
    #end
