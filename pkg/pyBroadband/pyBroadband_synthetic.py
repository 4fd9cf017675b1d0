#!/usr/bin/env python
'''
pyBroadband_synthetic

Synthetic fixtures: grid cities with addresses, income and block group
polygons, datasets drawn from the simulator scenarios, and cities with a
planted competition effect or a planted income gap in fiber deployment.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 02/06/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Planted Competition and Income Cities (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import json
import logging

# =============================================================================
# External Python modules
# =============================================================================
import numpy
import pandas
from shapely.geometry import box, mapping

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_address import Address
from pyBroadband.pyBroadband_plan import Plan
from pyBroadband.pyBroadband_metrics import best_cv
from pyBroadband.pyBroadband_history import DatasetRecord, Dataset
from pyBroadband.pyBroadband_sampler import queen_contiguity, ADDRESS_COLUMNS, INCOME_COLUMNS
from pyBroadband.pySIM.simulator import synthesize_truth, canonical_key, UNSERVICEABLE
from pyBroadband.pySIM.pySIM import load_scenarios

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

FIXTURE_TIMESTAMP = 1685577600.0

# (name, state, state+county FIPS, zip prefix, ISPs)
CITIES = (
('New Orleans', 'LA', '22071', '701', ('AT&T','Cox')),
('Wichita', 'KS', '20173', '672', ('AT&T','Cox')),
('Billings', 'MT', '30111', '591', ('CenturyLink','Spectrum')),
)

STREET_NAMES = ('Main','Oak','Pine','Maple','Cedar','Elm','Washington','Lake','Hill','Park','Sunset','River')
SUFFIXES = (('Street','St'),('Avenue','Ave'),('Road','Rd'),('Drive','Dr'),('Lane','Ln'),('Court','Ct'))

PLANTED_MONOPOLY_MEDIAN = 11.38
PLANTED_DUOPOLY_MEDIAN = 14.63
PLANTED_D = 0.65
PLANTED_PRICE = 50.0


def _geoid(prefix, row, col):

    # tract from the row, block group digit from the column
    return '%s%06d%d' %(prefix, 1000 + row, col + 1)


# =============================================================================
# Synthetic City Class
# =============================================================================
class SyntheticCity(object):

    '''
    Grid city: rows x cols block groups with addresses, income and polygons
    '''

    def __init__(self, name, state, prefix, zip_prefix, isps, rows=6, cols=6, per_group=8, seed=0,
        p_abbreviated=0.3, p_unit=0.1, origin=(0.0, 0.0)):

        '''
        Synthetic City Class Initialization

        **Arguments:**

        - name -> STR: City name
        - state -> STR: Two letter state code
        - prefix -> STR: Five digit state and county FIPS code
        - zip_prefix -> STR: Three digit zip prefix
        - isps -> LIST: ISP names serving the city

        **Keyword arguments:**

        - rows, cols -> INT: Grid size (cols <= 9), *Default* = 6
        - per_group -> INT: Addresses per block group, *Default* = 8
        - seed -> INT: Seed, *Default* = 0
        - p_abbreviated -> FLOAT: Streets written with an abbreviated suffix, *Default* = 0.3
        - p_unit -> FLOAT: Addresses carrying a unit, *Default* = 0.1
        - origin -> TUPLE: Lower left corner of the grid, *Default* = (0, 0)
        '''

        if (cols < 1) or (cols > 9) or (rows < 1):
            raise ValueError('Grid needs 1 <= cols <= 9 and rows >= 1 (got %d x %d)' %(rows,cols))
        #end
        self.name = name
        self.state = state
        self.isps = list(isps)
        self.rows = rows
        self.cols = cols
        rng = numpy.random.default_rng([int(seed), int(prefix)])

        #
        self.cells = {}
        self.polygons = {}
        for row in range(rows):
            for col in range(cols):
                geoid = _geoid(prefix, row, col)
                self.cells[geoid] = (row, col)
                self.polygons[geoid] = box(origin[0] + col, origin[1] + row, origin[0] + col + 1, origin[1] + row + 1)
            #end
        #end
        self.geoids = sorted(self.cells.keys())
        self.graph = queen_contiguity(self.geoids, [self.polygons[geoid] for geoid in self.geoids])

        # income rises from west to east
        self.income = {}
        for geoid in self.geoids:
            row, col = self.cells[geoid]
            self.income[geoid] = int(round(30000 + 12000*col + rng.normal(0, 4000)))
        #end

        #
        self.addresses = []
        for geoid in self.geoids:
            row, col = self.cells[geoid]
            zip = '%s%02d' %(zip_prefix, row % 100)
            for i in range(per_group):
                street_name = STREET_NAMES[(col*per_group + i) % len(STREET_NAMES)]
                full, short = SUFFIXES[(row + i) % len(SUFFIXES)]
                suffix = short if rng.random() < p_abbreviated else full
                unit = str(int(rng.integers(1,20))) if rng.random() < p_unit else None
                street = '%d %s %s' %(100 + 2*(row*cols*per_group + col*per_group + i), street_name, suffix)
                self.addresses.append(Address('%s-%03d' %(geoid, i), street, name, state, zip, geoid, unit))
            #end
        #end


    def assignment(self, scenario):

        '''
        Block group profiles banded west to east, best carriage value first
        '''

        ranked = sorted(scenario.profiles.keys(), key=lambda name: -best_cv(scenario.profiles[name]))
        assignment = {}
        for geoid in self.geoids:
            row, col = self.cells[geoid]
            assignment[geoid] = ranked[col*len(ranked)//self.cols]
        #end

        return assignment


    def __repr__(self):

        return 'SyntheticCity(%s, %d block groups, %d addresses)' %(self.name, len(self.geoids), len(self.addresses))



def three_city_fixture(seed=0, rows=6, cols=6, per_group=8):

    '''
    The three shipped fixture cities
    '''

    # grids sit side by side so no polygons of different cities touch
    return [SyntheticCity(name, state, prefix, zip_prefix, isps, rows, cols, per_group, seed, origin=(k*(cols + 2), 0))
        for k, (name, state, prefix, zip_prefix, isps) in enumerate(CITIES)]


#==============================================================================
# fixture_records function
#==============================================================================
def fixture_records(cities, seed=0, scenarios=None):

    '''
    Dataset records an ideal crawl of the fixture cities would produce

    Truth comes from the simulator scenarios of each city's ISPs, with block
    group profiles banded across the city so carriage values cluster.

    **Arguments:**

    - cities -> LIST: SyntheticCity instances

    **Keyword arguments:**

    - seed -> INT: Seed, *Default* = 0
    - scenarios -> LIST: SimScenario instances, *Default* = None (shipped scenarios)
    '''

    if scenarios is None:
        scenarios = load_scenarios()
    #end
    by_name = dict((scenario.isp_name, scenario) for scenario in scenarios)

    records = []
    for city in cities:
        for isp in city.isps:
            scenario = by_name[isp]
            truth, keyed = synthesize_truth(city.addresses, scenario, seed, assignment=city.assignment(scenario))
            for address in city.addresses:
                plans = truth[canonical_key(address.street, address.zip)]
                if plans == UNSERVICEABLE:
                    status, plans = 'Unserviceable', None
                else:
                    status = 'Hit'
                #end
                records.append(DatasetRecord(address.address_id, address.block_group_id, city.name, isp, status,
                    plans=plans, total_ms=100.0, timestamp=FIXTURE_TIMESTAMP, street=address.street,
                    unit=address.unit, state=address.state, zip=address.zip))
            #end
        #end
    #end

    return records


#==============================================================================
# write_fixture function
#==============================================================================
def write_fixture(directory, cities, records=None):

    '''
    Write addresses.csv, income.csv, adjacency.geojson and dataset.jsonl

    **Arguments:**

    - directory -> STR: Output directory
    - cities -> LIST: SyntheticCity instances

    **Keyword arguments:**

    - records -> LIST: DatasetRecords, *Default* = None (no dataset written)

    Returns a dict of the written file names.
    '''

    if not os.path.isdir(directory):
        os.makedirs(directory)
    #end
    paths = {
    'addresses':os.path.join(directory,'addresses.csv'),
    'income':os.path.join(directory,'income.csv'),
    'adjacency':os.path.join(directory,'adjacency.geojson'),
    }

    #
    rows = []
    income = []
    features = []
    for city in cities:
        for address in city.addresses:
            fields = address.to_dict()
            rows.append(dict((key, fields.get(key) or '') for key in ADDRESS_COLUMNS))
        #end
        for geoid in city.geoids:
            income.append({'block_group_id':geoid, 'median_household_income':city.income[geoid]})
            features.append({'type':'Feature', 'properties':{'GEOID':geoid, 'city':city.name},
                'geometry':mapping(city.polygons[geoid])})
        #end
    #end
    pandas.DataFrame(rows, columns=ADDRESS_COLUMNS).to_csv(paths['addresses'], index=False)
    pandas.DataFrame(income, columns=INCOME_COLUMNS).to_csv(paths['income'], index=False)
    with open(paths['adjacency'],'w',encoding='utf-8') as fid:
        json.dump({'type':'FeatureCollection', 'features':features}, fid)
    #end

    #
    if records is not None:
        paths['dataset'] = os.path.join(directory,'dataset.jsonl')
        with Dataset(paths['dataset'],'w') as dataset:
            for record in records:
                dataset.write(record)
            #end
        #end
    #end

    return paths


#==============================================================================
# competition_city function
#==============================================================================
def competition_city(n=40, cable='Cox', competitor='AT&T', city='Planted Competition', prefix='22071'):

    '''
    City with a planted cable competition effect

    Monopoly block group carriage values are spread evenly around a median
    of 11.38. Fiber duopoly block groups reuse the lowest 14 of 40 monopoly
    values and put the rest above the monopoly range, centred so the median
    is 14.63 and the one sided KS distance is 0.65. DSL duopoly block groups
    repeat the monopoly values (no effect).

    **Keyword arguments:**

    - n -> INT: Block groups per mode, *Default* = 40
    - cable -> STR: Cable ISP name, *Default* = 'Cox'
    - competitor -> STR: DSL/fiber ISP name, *Default* = 'AT&T'
    '''

    #
    monopoly = numpy.linspace(10.0, 2*PLANTED_MONOPOLY_MEDIAN - 10.0, n)
    shared = int(round(n*(1.0 - PLANTED_D)))
    upper = n - shared
    # median of the duopoly sorted sample sits among the upper values
    lo, hi = n//2 - 1 - shared, n//2 - shared
    if n % 2 == 1:
        lo = hi = n//2 - shared
    #end
    start = monopoly.max() + 0.25
    step = (PLANTED_DUOPOLY_MEDIAN - start)/(0.5*(lo + hi))
    fiber = numpy.concatenate([monopoly[:shared], start + step*numpy.arange(upper)])

    #
    records = []
    count = [0]

    def add(mode, cvs, competitor_plan):
        for cv in cvs:
            geoid = '%s%06d%d' %(prefix, 9000 + count[0]//9, count[0] % 9 + 1)
            count[0] += 1
            plan = Plan(cv*PLANTED_PRICE, 10.0, PLANTED_PRICE, 'cable')
            records.append(DatasetRecord('%s-%s' %(geoid,mode), geoid, city, cable, 'Hit', plans=[plan],
                timestamp=FIXTURE_TIMESTAMP))
            if competitor_plan is None:
                records.append(DatasetRecord('%s-%s' %(geoid,mode), geoid, city, competitor, 'Unserviceable',
                    timestamp=FIXTURE_TIMESTAMP))
            else:
                records.append(DatasetRecord('%s-%s' %(geoid,mode), geoid, city, competitor, 'Hit',
                    plans=[competitor_plan], timestamp=FIXTURE_TIMESTAMP))
            #end
        #end

    add('monopoly', monopoly, None)
    add('fiber', fiber, Plan(300, 300, 55, 'fiber'))
    add('dsl', monopoly, Plan(25, 5, 55, 'dsl'))

    return records


#==============================================================================
# income_city function
#==============================================================================
def income_city(n_low=100, n_high=100, fiber_low=41, fiber_high=57, isp='AT&T', city='Planted Income',
    prefix='20173', seed=0):

    '''
    City with a planted income gap in fiber deployment

    Returns (records, income) where income maps GEOID -> median household
    income; low income block groups all sit below every high income one.

    **Keyword arguments:**

    - n_low, n_high -> INT: Block groups per income group, *Default* = 100
    - fiber_low, fiber_high -> INT: Block groups with fiber per group, *Default* = 41, 57
    '''

    rng = numpy.random.default_rng(seed)
    records = []
    income = {}
    index = 0
    for base, n, with_fiber in ((20000, n_low, fiber_low), (80000, n_high, fiber_high)):
        chosen = set(rng.permutation(n)[:with_fiber].tolist())
        for i in range(n):
            geoid = '%s%06d%d' %(prefix, 8000 + index//9, index % 9 + 1)
            index += 1
            income[geoid] = base + 100*i
            if i in chosen:
                plans = [Plan(1000, 1000, 80, 'fiber'), Plan(300, 300, 55, 'fiber')]
            else:
                plans = [Plan(18, 1.5, 55, 'dsl')]
            #end
            records.append(DatasetRecord('%s-0' %(geoid), geoid, city, isp, 'Hit', plans=plans,
                timestamp=FIXTURE_TIMESTAMP))
        #end
    #end

    return records, income



#==============================================================================
# Synthetic Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Synthetic...')
    cities = three_city_fixture()
    for city in cities:
        print(city, city.graph)
    #end
    print(len(competition_city()), len(income_city()[0]))
