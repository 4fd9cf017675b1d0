#!/usr/bin/env python
'''
pyBroadband_release

Public release of a crawl dataset: address identifiers are replaced by
salted HMAC hashes of the normalized address and the address fields are
dropped.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.0   $Date: 12/06/2023 21:00$


History
-------
    v. 1.0  - Initial Release Function (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import logging

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import WeakSalt, EmptyInput
from pyBroadband.pyBroadband_address import Address, hash_address, MIN_SALT_BYTES
from pyBroadband.pyBroadband_history import Dataset, DatasetRecord, read_dataset

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)


def release_path(dataset_path):

    root, ext = os.path.splitext(dataset_path)

    return root + '_public' + (ext or '.jsonl')


def release_record(record, salt):

    '''
    Public copy of a dataset record
    '''

    if record.street is None:
        raise ValueError('Record %s carries no address fields (already released?)' %(record.address_id))
    #end
    address = Address(record.address_id, record.street, record.city, record.state, record.zip,
        record.geoid, record.unit)

    return DatasetRecord(hash_address(address, salt), record.geoid, record.city, record.isp, record.status,
        plans=record.plans, total_ms=record.total_ms, timestamp=record.timestamp, reason=record.reason)


#==============================================================================
# release function
#==============================================================================
def release(dataset_path, salt, output_path=None):

    '''
    Write the hashed public dataset

    Records keep their order, geoid, city, ISP, status, plans and carriage
    value. The salt is never written.

    **Arguments:**

    - dataset_path -> STR: Crawl dataset (JSON lines)
    - salt -> BYTES/STR: Secret salt of at least 16 bytes

    **Keyword arguments:**

    - output_path -> STR: Public dataset, *Default* = <dataset>_public.jsonl

    Returns the output path.
    '''

    #
    if isinstance(salt,str):
        salt = salt.encode('utf-8')
    #end
    if (salt is None) or (len(salt) < MIN_SALT_BYTES):
        raise WeakSalt('Release salt must hold at least %d bytes' %(MIN_SALT_BYTES))
    #end
    records = read_dataset(dataset_path)
    if len(records) == 0:
        raise EmptyInput('Dataset %s holds no records' %(dataset_path))
    #end
    if output_path is None:
        output_path = release_path(dataset_path)
    #end

    #
    with Dataset(output_path,'w') as public:
        for record in records:
            public.write(release_record(record, salt))
        #end
    #end
    logger.info('released %d records to %s', len(records), output_path)

    return output_path
