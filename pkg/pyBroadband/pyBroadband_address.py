#!/usr/bin/env python
'''
pyBroadband_address

Holds the Street Address Classes and the address matching routines:
canonicalization, suggestion matching and keyed hashing for release.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.2   $Date: 28/03/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Token Level Suggestion Matching (2023)
    v. 1.2  - Keyed Address Hashing (2023)
'''

__version__ = '$Revision: $'

'''
To Do:
    - directional prefixes (N, S, E, W) are left unexpanded
'''

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import re
import hmac
import hashlib
import functools

# =============================================================================
# External Python modules
# =============================================================================
from rapidfuzz.distance import Levenshtein

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import InvalidAddress, EmptyStreet, WeakSalt

# =============================================================================
# Misc Definitions
# =============================================================================
ABBREVIATIONS_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)),'data','abbreviations.txt')
MIN_SALT_BYTES = 16

_ZIP = re.compile(r'^[0-9]{5}$')
_STATE = re.compile(r'^[A-Z]{2}$')
_GEOID = re.compile(r'^[0-9]{12}$')
_DROP = re.compile(r"[.']")
_SPLIT = re.compile(r'[^A-Z0-9\-]+')


@functools.lru_cache(maxsize=None)
def load_abbreviations(path=ABBREVIATIONS_FILE):

    '''
    Read the two-column abbreviation table (abbrev, expansion)

    **Keyword arguments:**

    - path -> STR: Table file name, *Default* = ABBREVIATIONS_FILE
    '''

    table = {}
    with open(path,'r',encoding='utf-8') as fid:
        for line in fid:
            line = line.strip()
            if (line == '') or line.startswith('#'):
                continue
            #end
            abbrev, expansion = [item.strip().upper() for item in line.split(',',1)]
            table[abbrev] = expansion
        #end
    #end

    return table


# =============================================================================
# Address Class
# =============================================================================
class Address(object):

    '''
    Residential Street Address Class
    '''

    def __init__(self, address_id, street, city, state, zip, block_group_id, unit=None):

        '''
        Address Class Initialization

        **Arguments:**

        - address_id -> STR: Opaque address identifier
        - street -> STR: Street line (number, name, suffix)
        - city -> STR: City name
        - state -> STR: Two letter state code
        - zip -> STR: Five digit zip code
        - block_group_id -> STR: Twelve digit census block group GEOID

        **Keyword arguments:**

        - unit -> STR: Dwelling unit, *Default* = None
        '''

        #
        self.address_id = str(address_id).strip()
        self.street = ' '.join(str(street).split())
        self.unit = None
        if (unit is not None) and (str(unit).strip() != ''):
            self.unit = str(unit).strip()
        #end
        self.city = str(city).strip()
        self.state = str(state).strip().upper()
        self.zip = str(zip).strip()
        self.block_group_id = str(block_group_id).strip()

        #
        if self.address_id == '':
            raise InvalidAddress('Address identifier must not be empty')
        #end
        if self.street == '':
            raise EmptyStreet('Address %s has an empty street' %(self.address_id))
        #end
        if self.city == '':
            raise InvalidAddress('Address %s has an empty city' %(self.address_id))
        #end
        if not _STATE.match(self.state):
            raise InvalidAddress('Address %s state %r is not a two letter code' %(self.address_id,state))
        #end
        if not _ZIP.match(self.zip):
            raise InvalidAddress('Address %s zip %r is not five digits' %(self.address_id,zip))
        #end
        if not _GEOID.match(self.block_group_id):
            raise InvalidAddress('Address %s block group %r is not a 12 digit GEOID' %(self.address_id,block_group_id))
        #end


    def line1(self):

        '''
        Street line including the dwelling unit when present
        '''

        if self.unit is None:
            return self.street
        #end

        return '%s APT %s' %(self.street, self.unit)


    def replace(self, **kwargs):

        '''
        Copy of the address with some fields replaced
        '''

        fields = self.to_dict()
        fields.update(kwargs)

        return Address(**fields)


    def to_dict(self):

        return {'address_id':self.address_id, 'street':self.street, 'unit':self.unit,
            'city':self.city, 'state':self.state, 'zip':self.zip,
            'block_group_id':self.block_group_id}


    def __eq__(self, other):

        if not isinstance(other,Address):
            return NotImplemented
        #end

        return self.to_dict() == other.to_dict()


    def __hash__(self):

        return hash(tuple(sorted(self.to_dict().items(), key=lambda item: item[0])))


    def __repr__(self):

        return 'Address(%r, %r, %s, %s %s)' %(self.address_id, self.line1(), self.city, self.state, self.zip)



# =============================================================================
# Canonical Address Class
# =============================================================================
class CanonicalAddress(object):

    '''
    Canonical (uppercased, suffix expanded) street form
    '''

    def __init__(self, tokens, zip):

        self.tokens = list(tokens)
        self.zip = zip


    def text(self):

        return ' '.join(self.tokens)


    def __eq__(self, other):

        if not isinstance(other,CanonicalAddress):
            return NotImplemented
        #end

        return (self.tokens == other.tokens) and (self.zip == other.zip)


    def __repr__(self):

        return 'CanonicalAddress(%r, %r)' %(self.tokens, self.zip)



#==============================================================================
# normalize function
#==============================================================================
def normalize(street, zip='', table=None):

    '''
    Canonicalize a noisy street line

    Uppercases, drops periods and apostrophes, turns any other punctuation
    into whitespace, collapses whitespace and expands suffix abbreviations.
    Hyphens inside tokens ("45-B") are kept. The result is a fixed point:
    normalize(normalize(x).text()) == normalize(x).

    **Arguments:**

    - street -> STR: Street line

    **Keyword arguments:**

    - zip -> STR: Zip code carried along, *Default* = ''
    - table -> DICT: Abbreviation table, *Default* = shipped table
    '''

    #
    if (street is None) or (str(street).strip() == ''):
        raise EmptyStreet('Street must not be empty')
    #end
    if table is None:
        table = load_abbreviations()
    #end

    #
    text = _DROP.sub('', str(street).upper())
    tokens = []
    for token in _SPLIT.split(text):
        token = token.strip('-')
        if token == '':
            continue
        #end
        tokens.append(table.get(token,token))
    #end
    if tokens == []:
        raise EmptyStreet('Street %r holds no address tokens' %(street))
    #end

    return CanonicalAddress(tokens, str(zip).strip())


#==============================================================================
# edit_distance function
#==============================================================================
def edit_distance(tokens_a, tokens_b):

    '''
    Token level Levenshtein distance (unit insert, delete and substitute)
    '''

    return Levenshtein.distance(list(tokens_a), list(tokens_b))


#==============================================================================
# match_suggestion function
#==============================================================================
def match_suggestion(input, suggestions, suggestion_zips):

    '''
    Pick the suggested street that best matches the queried address

    Only suggestions sharing the queried zip code are considered; among
    them the one at the smallest token edit distance wins, lowest index on
    ties. Returns None when no suggestion passes the zip filter.

    **Arguments:**

    - input -> INST: Queried Address
    - suggestions -> LIST: Suggested street lines
    - suggestion_zips -> LIST: Zip code of every suggestion
    '''

    #
    if len(suggestions) != len(suggestion_zips):
        raise ValueError('Suggestions and suggestion zips must have the same length (%d != %d)' %(len(suggestions),len(suggestion_zips)))
    #end

    #
    target = normalize(input.line1()).tokens
    best = None
    best_dist = None
    for i in range(len(suggestions)):
        if str(suggestion_zips[i]).strip() != input.zip:
            continue
        #end
        try:
            tokens = normalize(suggestions[i]).tokens
        except EmptyStreet:
            continue
        #end
        dist = edit_distance(target, tokens)
        if (best_dist is None) or (dist < best_dist):
            best = i
            best_dist = dist
        #end
    #end

    return best


#==============================================================================
# hash_address function
#==============================================================================
def hash_address(address, salt):

    '''
    Keyed digest of the normalized full address

    **Arguments:**

    - address -> INST: Address to hash
    - salt -> BYTES: Secret key, at least 16 bytes
    '''

    #
    if isinstance(salt,str):
        salt = salt.encode('utf-8')
    #end
    if (salt is None) or (len(salt) < MIN_SALT_BYTES):
        raise WeakSalt('Salt must hold at least %d bytes' %(MIN_SALT_BYTES))
    #end

    #
    message = '|'.join([normalize(address.line1()).text(), address.city.upper(), address.state, address.zip])

    return hmac.new(salt, message.encode('utf-8'), hashlib.sha256).hexdigest()



#==============================================================================
# Address Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Address...')
    print(normalize('45-B Elm Ct.', '67202'))
