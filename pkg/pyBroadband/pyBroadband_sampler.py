#!/usr/bin/env python
'''
pyBroadband_sampler

Holds the input loaders (addresses, block group income, adjacency) and the
per block group address sampling that produces crawl targets.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.2   $Date: 16/05/2023 21:00$


History
-------
    v. 1.0  - Initial Loader Creation (2023)
    v. 1.1  - Queen Contiguity from GeoJSON Polygons (2023)
    v. 1.2  - Order Independent Sample Plans (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import re
import json
import math
import logging

# =============================================================================
# External Python modules
# =============================================================================
import numpy
import pandas
from shapely.geometry import shape
from shapely.errors import ShapelyError
from shapely.strtree import STRtree

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import FileMissing, MalformedHeader, ConflictingDuplicate, \
    AsymmetryAfterClose, EmptyBlockGroup, InvalidAddress
from pyBroadband.pyBroadband_address import Address
from pyBroadband.pyBroadband_spatial import AdjacencyGraph

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

ADDRESS_COLUMNS = ['address_id','street','unit','city','state','zip','block_group_id']
INCOME_COLUMNS = ['block_group_id','median_household_income']
EDGE_COLUMNS = ['geoid_a','geoid_b']
GEOID_KEYS = ('GEOID','geoid','GEOID10','GEOID20','block_group_id')
DEFAULT_RATE = 0.10
DEFAULT_FLOOR = 30

_GEOID = re.compile(r'^[0-9]{12}$')


# =============================================================================
# Row Report Class
# =============================================================================
class RowReport(object):

    '''
    Non-fatal per row rejections of a loaded file
    '''

    def __init__(self, filename=''):

        self.filename = filename
        self.accepted = 0
        self.rejected = []


    def reject(self, row, reason):

        self.rejected.append((row, reason))
        logger.warning('%s row %d rejected: %s', self.filename, row, reason)


    def __str__(self):

        text = '%s: %d accepted, %d rejected\n' %(self.filename, self.accepted, len(self.rejected))
        for row, reason in self.rejected:
            text += '    row %6d  %s\n' %(row, reason)
        #end

        return text



def _read_csv(path, required):

    if not os.path.isfile(path):
        raise FileMissing('Error: input file %s does not exist' %(path))
    #end
    try:
        frame = pandas.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pandas.errors.EmptyDataError:
        raise MalformedHeader('File %s has no header row' %(path))
    #end
    frame.columns = [str(column).strip() for column in frame.columns]
    missing = [column for column in required if column not in frame.columns]
    if missing:
        raise MalformedHeader('File %s misses columns %s (found %s)' %(path,missing,list(frame.columns)))
    #end

    return frame


#==============================================================================
# load_addresses function
#==============================================================================
def load_addresses(path, report=None):

    '''
    Load the address CSV, rejecting invalid and duplicate rows

    **Arguments:**

    - path -> STR: CSV with columns address_id, street, unit, city, state, zip, block_group_id

    **Keyword arguments:**

    - report -> INST: RowReport collecting rejections, *Default* = None

    The unit column may be omitted. Row numbers count the header as row 1.
    '''

    #
    frame = _read_csv(path, [column for column in ADDRESS_COLUMNS if column != 'unit'])
    if report is None:
        report = RowReport(path)
    #end
    if 'unit' not in frame.columns:
        frame['unit'] = ''
    #end

    #
    addresses = []
    seen = set()
    for i, row in enumerate(frame[ADDRESS_COLUMNS].itertuples(index=False)):
        line = i + 2
        try:
            address = Address(row.address_id, row.street, row.city, row.state, row.zip, row.block_group_id, unit=row.unit)
        except InvalidAddress as error:
            report.reject(line, str(error))
            continue
        #end
        if address.address_id in seen:
            report.reject(line, 'duplicate address_id %s' %(address.address_id))
            continue
        #end
        seen.add(address.address_id)
        addresses.append(address)
    #end
    report.accepted = len(addresses)
    logger.info('loaded %d addresses from %s (%d rejected)', len(addresses), path, len(report.rejected))

    return addresses


#==============================================================================
# load_income function
#==============================================================================
def load_income(path, report=None):

    '''
    Load block group median household income

    **Arguments:**

    - path -> STR: CSV with columns block_group_id, median_household_income

    **Keyword arguments:**

    - report -> INST: RowReport collecting rejections, *Default* = None
    '''

    frame = _read_csv(path, INCOME_COLUMNS)
    if report is None:
        report = RowReport(path)
    #end

    income = {}
    for i, row in enumerate(frame[INCOME_COLUMNS].itertuples(index=False)):
        line = i + 2
        geoid = row.block_group_id.strip()
        if not _GEOID.match(geoid):
            report.reject(line, 'block group %r is not a 12 digit GEOID' %(geoid))
            continue
        #end
        try:
            value = float(row.median_household_income)
        except ValueError:
            report.reject(line, 'income %r is not a number' %(row.median_household_income))
            continue
        #end
        if (not numpy.isfinite(value)) or (value <= 0):
            report.reject(line, 'income %r must be positive' %(row.median_household_income))
            continue
        #end
        if (geoid in income) and (income[geoid] != value):
            raise ConflictingDuplicate('Block group %s has conflicting incomes %g and %g' %(geoid,income[geoid],value))
        #end
        income[geoid] = value
    #end
    report.accepted = len(income)

    return income


def _feature_geoid(feature):

    properties = feature.get('properties') or {}
    for key in GEOID_KEYS:
        if key in properties:
            return str(properties[key])
        #end
    #end
    if 'id' in feature:
        return str(feature['id'])
    #end

    raise MalformedHeader('Polygon feature carries no GEOID property')


def queen_contiguity(geoids, geometries):

    '''
    Graph joining polygons that share an edge or a corner

    **Arguments:**

    - geoids -> LIST: Polygon identifiers
    - geometries -> LIST: shapely geometries in the same order
    '''

    graph = AdjacencyGraph(geoids)
    tree = STRtree(geometries)
    for i, geometry in enumerate(geometries):
        for j in tree.query(geometry):
            j = int(j)
            if (j > i) and geometry.intersects(geometries[j]):
                graph.add_edge(geoids[i], geoids[j])
            #end
        #end
    #end

    return graph


#==============================================================================
# load_adjacency function
#==============================================================================
def load_adjacency(path, strict=False):

    '''
    Load the block group adjacency graph

    A .csv file is an edge list (geoid_a, geoid_b) and is symmetrized; with
    strict set, every edge must already appear in both directions. A
    .geojson/.json file is a polygon FeatureCollection keyed by GEOID from
    which queen contiguity is derived. Self edges are dropped.

    **Arguments:**

    - path -> STR: Edge list or polygon file

    **Keyword arguments:**

    - strict -> BOOL: Edge list is directed-strict, *Default* = False
    '''

    #
    if not os.path.isfile(path):
        raise FileMissing('Error: adjacency file %s does not exist' %(path))
    #end

    #
    if os.path.splitext(path)[1].lower() in ('.geojson','.json'):
        with open(path,'r',encoding='utf-8') as fid:
            try:
                doc = json.load(fid)
            except (json.JSONDecodeError, UnicodeDecodeError) as error:
                raise MalformedHeader('Polygon file %s is not valid GeoJSON: %s' %(path,error))
            #end
        #end
        if (not isinstance(doc, dict)) or (not isinstance(doc.get('features',[]), list)):
            raise MalformedHeader('Polygon file %s is not a FeatureCollection' %(path))
        #end
        features = doc.get('features',[])
        try:
            geoids = [_feature_geoid(feature) for feature in features]
            geometries = [shape(feature['geometry']) for feature in features]
        except (KeyError, TypeError, AttributeError, ShapelyError) as error:
            raise MalformedHeader('Polygon file %s holds an unreadable geometry: %r' %(path,error))
        #end
        graph = queen_contiguity(geoids, geometries)
    else:
        frame = _read_csv(path, EDGE_COLUMNS)
        graph = AdjacencyGraph()
        directed = set()
        selfs = 0
        for row in frame[EDGE_COLUMNS].itertuples(index=False):
            a = row.geoid_a.strip()
            b = row.geoid_b.strip()
            if b == '':
                graph.add_node(a)
                continue
            #end
            if a == b:
                selfs += 1
                graph.add_node(a)
                continue
            #end
            directed.add((a,b))
            graph.add_edge(a, b)
        #end
        if selfs:
            logger.warning('%s: dropped %d self edges', path, selfs)
        #end
        if strict:
            missing = sorted([(a,b) for (a,b) in directed if (b,a) not in directed])
            if missing:
                raise AsymmetryAfterClose('Strict edge list %s lacks the reverse of %d edges, first %s' %(path,len(missing),missing[0]))
            #end
        #end
    #end

    #
    if not graph.is_symmetric():
        raise AsymmetryAfterClose('Adjacency graph from %s is not symmetric' %(path))
    #end
    isolated = graph.isolated()
    logger.info('loaded %s from %s', graph, path)
    if isolated:
        logger.info('%d isolated block groups in %s', len(isolated), path)
    #end

    return graph


#==============================================================================
# sample_block_group function
#==============================================================================
def sample_size(n, rate=DEFAULT_RATE, floor=DEFAULT_FLOOR):

    '''
    min(n, max(ceil(rate*n), floor))
    '''

    return min(n, max(int(math.ceil(rate*n - 1e-9)), floor))


def sample_block_group(addresses, rate=DEFAULT_RATE, floor=DEFAULT_FLOOR, seed=0):

    '''
    Uniform sample without replacement of one block group's addresses

    **Arguments:**

    - addresses -> LIST: Addresses of the block group

    **Keyword arguments:**

    - rate -> FLOAT: Sampling rate in (0, 1], *Default* = 0.10
    - floor -> INT: Minimum sample size, *Default* = 30
    - seed -> INT/LIST: numpy generator seed, *Default* = 0
    '''

    #
    if len(addresses) == 0:
        raise EmptyBlockGroup('Cannot sample an empty block group')
    #end
    if not (0 < rate <= 1):
        raise ValueError('Sampling rate must lie in (0, 1] (got %r)' %(rate))
    #end
    if floor < 1:
        raise ValueError('Sampling floor must be >= 1 (got %r)' %(floor))
    #end

    #
    size = sample_size(len(addresses), rate, floor)
    rng = numpy.random.default_rng(seed)
    chosen = rng.choice(len(addresses), size=size, replace=False)

    return [addresses[i] for i in sorted(chosen)]


# =============================================================================
# Sample Plan Class
# =============================================================================
class SamplePlan(object):

    '''
    Chosen addresses per block group
    '''

    def __init__(self, chosen, rate, floor, seed):

        self.chosen = chosen
        self.rate = rate
        self.floor = floor
        self.seed = seed


    def addresses(self):

        return [address for geoid in sorted(self.chosen.keys()) for address in self.chosen[geoid]]


    def address_ids(self, geoid):

        return [address.address_id for address in self.chosen[geoid]]


    def write(self, path):

        '''
        Write the chosen addresses in the address CSV schema
        '''

        frame = pandas.DataFrame([address.to_dict() for address in self.addresses()], columns=ADDRESS_COLUMNS)
        frame['unit'] = frame['unit'].fillna('')
        frame.to_csv(path, index=False)


    def __str__(self):

        text = '\nSample Plan (rate %g, floor %d, seed %s)\n%s\n' %(self.rate, self.floor, self.seed, '='*60)
        text += '    Block Group      Chosen\n'
        for geoid in sorted(self.chosen.keys()):
            text += '    %s %8d\n' %(geoid, len(self.chosen[geoid]))
        #end
        text += '    Total        %8d\n' %(len(self.addresses()))

        return text



def build_sample_plan(addresses, rate=DEFAULT_RATE, floor=DEFAULT_FLOOR, seed=0):

    '''
    Sample every block group with a seed derived from (seed, GEOID)

    Addresses are ordered by address_id inside each block group, so the plan
    does not depend on input order.
    '''

    groups = {}
    for address in addresses:
        groups.setdefault(address.block_group_id, []).append(address)
    #end
    chosen = {}
    for geoid in sorted(groups.keys()):
        members = sorted(groups[geoid], key=lambda address: address.address_id)
        chosen[geoid] = sample_block_group(members, rate, floor, [int(seed), int(geoid)])
    #end

    return SamplePlan(chosen, rate, floor, seed)


# =============================================================================
# Block Group Class
# =============================================================================
class BlockGroup(object):

    def __init__(self, id, city, median_household_income_usd, addresses, neighbors):

        self.id = id
        self.city = city
        self.median_household_income_usd = median_household_income_usd
        self.addresses = list(addresses)
        self.neighbors = list(neighbors)


    def __repr__(self):

        return 'BlockGroup(%s, %s, income=%s, %d addresses, %d neighbors)' %(self.id, self.city,
            self.median_household_income_usd, len(self.addresses), len(self.neighbors))



def build_block_groups(addresses, income, graph):

    '''
    BlockGroup records keyed by GEOID from addresses, income and adjacency
    '''

    groups = {}
    for address in addresses:
        geoid = address.block_group_id
        if geoid not in groups:
            neighbors = []
            if geoid in graph.nodes:
                neighbors = graph.neighbors(geoid)
            #end
            groups[geoid] = BlockGroup(geoid, address.city, income.get(geoid), [], neighbors)
        #end
        groups[geoid].addresses.append(address.address_id)
    #end

    return groups
