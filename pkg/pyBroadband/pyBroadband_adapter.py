#!/usr/bin/env python
'''
pyBroadband_adapter

Holds the Template Kind Enumeration and the ISP Adapter Specification Class.

An adapter describes one ISP availability tool: the patterns that tell its
page templates apart, the extraction patterns for the payload of each
template, the per-template wait budget and the step budget.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 21/03/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Added Extraction Patterns (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import re
import enum
import glob
import logging

# =============================================================================
# External Python modules
# =============================================================================
import yaml

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import InvalidAdapter, FileMissing

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

ADAPTERS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)),'data','adapters')
DEFAULT_MAX_STEPS = 8
DEFAULT_WAIT_MS = 30000.0


# =============================================================================
# Template Kind Enumeration
# =============================================================================
class TemplateKind(str, enum.Enum):

    PLANS_PAGE = 'PlansPage'
    INCORRECT_ADDRESS = 'IncorrectAddress'
    MULTI_DWELLING_UNIT = 'MultiDwellingUnit'
    EXISTING_CUSTOMER = 'ExistingCustomer'
    UNSERVICEABLE = 'Unserviceable'
    BLOCKED = 'Blocked'
    UNKNOWN = 'Unknown'


# classification order when several patterns match
PRIORITY = (TemplateKind.PLANS_PAGE, TemplateKind.INCORRECT_ADDRESS,
    TemplateKind.MULTI_DWELLING_UNIT, TemplateKind.EXISTING_CUSTOMER,
    TemplateKind.UNSERVICEABLE, TemplateKind.BLOCKED)

# template marker slugs rendered by the simulator fleet
SLUGS = {
TemplateKind.PLANS_PAGE:'plans-grid',
TemplateKind.INCORRECT_ADDRESS:'address-suggestions',
TemplateKind.MULTI_DWELLING_UNIT:'unit-select',
TemplateKind.EXISTING_CUSTOMER:'existing-customer',
TemplateKind.UNSERVICEABLE:'no-service',
TemplateKind.BLOCKED:'blocked',
}

DEFAULT_EXTRACTORS = {
'plans':r'<div class="plan" data-download="(?P<download>[0-9.]+)" data-upload="(?P<upload>[0-9.]+)" data-price="(?P<price>[0-9.]+)" data-tech="(?P<technology>[a-z]+)"',
'suggestions':r'<li class="suggestion" data-zip="(?P<zip>[0-9]{5})">(?P<street>[^<]+)</li>',
'units':r'<li class="unit">(?P<unit>[^<]+)</li>',
'options':r'<button class="option" data-option="(?P<index>[0-9]+)">(?P<label>[^<]+)</button>',
'new_customer':r'(?i)new customer',
}


def marker(isp_name, kind):

    '''
    Template marker string for an ISP page template
    '''

    return 'data-bat="%s:%s"' %(isp_name.lower(), SLUGS[kind])


def _kind(name):

    try:
        return TemplateKind(name)
    except ValueError:
        raise InvalidAdapter('Template kind %r not understood - use one of %s' %(name,[k.value for k in TemplateKind]))
    #end


# =============================================================================
# Adapter Specification Class
# =============================================================================
class AdapterSpec(object):

    '''
    ISP Availability Tool Adapter Specification Class
    '''

    def __init__(self, isp_name, patterns, timing_table, max_steps=DEFAULT_MAX_STEPS, extractors=None):

        '''
        Adapter Specification Class Initialization

        **Arguments:**

        - isp_name -> STR: ISP name
        - patterns -> DICT: TemplateKind -> regular expression (STR or LIST of STR)
        - timing_table -> DICT: TemplateKind -> maximum wait in milliseconds

        **Keyword arguments:**

        - max_steps -> INT: Maximum transport requests per session, *Default* = 8
        - extractors -> DICT: Payload extraction patterns, *Default* = DEFAULT_EXTRACTORS
        '''

        #
        self.isp_name = str(isp_name)
        self.max_steps = int(max_steps)

        # Template Patterns
        self.patterns = {}
        for key in list(patterns.keys()):
            kind = _kind(key)
            values = patterns[key]
            if isinstance(values,str):
                values = [values]
            #end
            try:
                self.patterns[kind] = [re.compile(value) for value in values]
            except re.error as error:
                raise InvalidAdapter('Adapter %s pattern for %s does not compile: %s' %(self.isp_name,kind.value,error))
            #end
        #end
        for kind in PRIORITY:
            if len(self.patterns.get(kind,[])) == 0:
                raise InvalidAdapter('Adapter %s needs at least one pattern for %s' %(self.isp_name,kind.value))
            #end
        #end

        # Timing Table
        self.timing_table = {}
        for key in list(timing_table.keys()):
            kind = _kind(key)
            value = float(timing_table[key])
            if value <= 0:
                raise InvalidAdapter('Adapter %s wait for %s must be positive' %(self.isp_name,kind.value))
            #end
            self.timing_table[kind] = value
        #end
        for kind in TemplateKind:
            if kind not in self.timing_table:
                raise InvalidAdapter('Adapter %s timing table misses %s' %(self.isp_name,kind.value))
            #end
        #end

        #
        if self.max_steps < 3:
            raise InvalidAdapter('Adapter %s max_steps must be >= 3' %(self.isp_name))
        #end

        # Extraction Patterns
        values = dict(DEFAULT_EXTRACTORS)
        if extractors is not None:
            values.update(extractors)
        #end
        self.extractors = {}
        for key in list(values.keys()):
            self.extractors[key] = re.compile(values[key])
        #end


    @classmethod
    def default(cls, isp_name, timing_table=None, max_steps=DEFAULT_MAX_STEPS):

        '''
        Adapter for the simulator markup of an ISP

        **Arguments:**

        - isp_name -> STR: ISP name

        **Keyword arguments:**

        - timing_table -> DICT: Waits in ms, missing kinds get DEFAULT_WAIT_MS, *Default* = None
        - max_steps -> INT: Step budget, *Default* = 8
        '''

        patterns = {}
        for kind in PRIORITY:
            patterns[kind] = re.escape(marker(isp_name, kind))
        #end
        table = dict((kind, DEFAULT_WAIT_MS) for kind in TemplateKind)
        if timing_table is not None:
            for key in list(timing_table.keys()):
                table[_kind(key)] = timing_table[key]
            #end
        #end

        return cls(isp_name, patterns, table, max_steps)


    @classmethod
    def load(cls, path):

        '''
        Load an Adapter Specification from a YAML document

        Keys: isp_name, patterns (kind -> pattern or list), timing_table_ms
        (kind -> ms), default_wait_ms (fills kinds absent from the table),
        max_steps, extractors.

        **Arguments:**

        - path -> STR: YAML file name
        '''

        #
        if not os.path.isfile(path):
            raise FileMissing('Error: adapter file %s does not exist' %(path))
        #end
        with open(path,'r',encoding='utf-8') as fid:
            try:
                doc = yaml.safe_load(fid)
            except yaml.YAMLError as error:
                raise InvalidAdapter('Adapter file %s is not valid YAML: %s' %(path,error))
            #end
        #end
        if not isinstance(doc,dict):
            raise InvalidAdapter('Adapter file %s must hold a mapping' %(path))
        #end
        for key in ('isp_name','patterns'):
            if key not in doc:
                raise InvalidAdapter('Adapter file %s misses %r' %(path,key))
            #end
        #end

        #
        default_wait = float(doc.get('default_wait_ms',DEFAULT_WAIT_MS))
        table = dict((kind.value, default_wait) for kind in TemplateKind)
        table.update(doc.get('timing_table_ms') or {})
        spec = cls(doc['isp_name'], doc['patterns'], table,
            doc.get('max_steps',DEFAULT_MAX_STEPS), doc.get('extractors'))
        logger.debug('loaded adapter %s from %s', spec.isp_name, path)

        return spec


    def __str__(self):

        '''
        Print Structured Adapter Specification
        '''

        text = '\nAdapter -- %s\n%s\n' %(self.isp_name,'='*60)
        text += '    Template             Patterns    Max Wait (ms)\n'
        for kind in TemplateKind:
            text += '    %-20s %8d %16.0f\n' %(kind.value, len(self.patterns.get(kind,[])), self.timing_table[kind])
        #end
        text += '    Max Steps: %d\n' %(self.max_steps)

        return text


def load_adapters(paths):

    '''
    Load adapter specifications from files or directories of YAML files

    **Arguments:**

    - paths -> LIST: File or directory names
    '''

    adapters = []
    for path in paths:
        if os.path.isdir(path):
            for fname in sorted(glob.glob(os.path.join(path,'*.yaml'))):
                adapters.append(AdapterSpec.load(fname))
            #end
        else:
            adapters.append(AdapterSpec.load(path))
        #end
    #end
    names = [adapter.isp_name for adapter in adapters]
    if len(set(names)) != len(names):
        raise InvalidAdapter('Adapter ISP names must be distinct: %s' %(names))
    #end

    return adapters



#==============================================================================
# Adapter Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Adapters...')
    for adapter in load_adapters([ADAPTERS_DIR]):
        print(adapter)
    #end
