#!/usr/bin/env python
'''
pyBroadband_plan

Holds the Broadband Plan Class and the plan sanity window.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.0   $Date: 14/03/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import enum

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import InvalidPlan

# =============================================================================
# Misc Definitions
# =============================================================================
# observed plan ranges across the seven major ISPs
SANITY_WINDOW = {
'download':(0.2,2000.0),        # Mbps
'upload':(0.2,2000.0),          # Mbps
'price':(20.0,120.0),           # USD per month
}


# =============================================================================
# Technology Enumeration
# =============================================================================
class Technology(str, enum.Enum):

    DSL = 'dsl'
    FIBER = 'fiber'
    CABLE = 'cable'



# =============================================================================
# Plan Class
# =============================================================================
class Plan(object):

    '''
    Broadband Plan Class
    '''

    def __init__(self, download_mbps, upload_mbps, monthly_price_usd, technology, window=None):

        '''
        Plan Class Initialization

        **Arguments:**

        - download_mbps -> FLOAT: Download speed in Mbps
        - upload_mbps -> FLOAT: Upload speed in Mbps
        - monthly_price_usd -> FLOAT: Monthly price in USD
        - technology -> STR: Access technology ('dsl', 'fiber' or 'cable')

        **Keyword arguments:**

        - window -> DICT: Sanity window overriding SANITY_WINDOW, *Default* = None
        '''

        #
        try:
            self.download_mbps = float(download_mbps)
            self.upload_mbps = float(upload_mbps)
            self.monthly_price_usd = float(monthly_price_usd)
        except (TypeError, ValueError):
            raise InvalidPlan('Plan speeds and price must be numbers: %r %r %r' %(download_mbps,upload_mbps,monthly_price_usd))
        #end
        try:
            self.technology = Technology(str(technology).lower())
        except ValueError:
            raise InvalidPlan('Plan technology not understood - use dsl, fiber or cable: %r' %(technology))
        #end

        #
        if (self.download_mbps <= 0) or (self.upload_mbps <= 0) or (self.monthly_price_usd <= 0):
            raise InvalidPlan('Plan speeds and price must be positive: %s' %(self.__str__()))
        #end
        if window is None:
            window = SANITY_WINDOW
        #end
        checks = (('download',self.download_mbps),('upload',self.upload_mbps),('price',self.monthly_price_usd))
        for key, value in checks:
            lower, upper = window[key]
            if not (lower <= value <= upper):
                raise InvalidPlan('Plan %s %g outside sanity window [%g, %g]' %(key,value,lower,upper))
            #end
        #end


    def key(self):

        return (self.download_mbps, self.upload_mbps, self.monthly_price_usd, self.technology.value)


    def __eq__(self, other):

        if not isinstance(other,Plan):
            return NotImplemented
        #end

        return self.key() == other.key()


    def __hash__(self):

        return hash(self.key())


    def __repr__(self):

        return 'Plan(%g, %g, %g, %r)' %self.key()


    def __str__(self):

        '''
        Print Structured Plan
        '''

        return '%12g %12g %10.2f %8s' %self.key()


    def to_dict(self):

        return {'download_mbps':self.download_mbps, 'upload_mbps':self.upload_mbps,
            'monthly_price_usd':self.monthly_price_usd, 'technology':self.technology.value}


    @classmethod
    def from_dict(cls, data, window=None):

        return cls(data['download_mbps'], data['upload_mbps'], data['monthly_price_usd'],
            data['technology'], window=window)



#==============================================================================
# Plan Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Plan...')
    print(Plan(1000, 1000, 80, 'fiber'))
