#!/usr/bin/env python
'''
pyBroadband_limiter

Holds the shared crawl facilities: the per host sliding window Rate Limiter,
the Egress Rotation counter and the In Flight Gauge.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.0   $Date: 27/04/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import math
import asyncio
import threading
import collections
import logging

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import ConfigInvalid

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)


# =============================================================================
# Rate Limiter Class
# =============================================================================
class RateLimiter(object):

    '''
    Per host sliding window limiter: at most *rate* requests per minute

    Rates below one request per minute keep a single slot and stretch the
    window (0.5/min allows one request every 120 s).
    '''

    def __init__(self, per_host_rate, window_s=60.0):

        '''
        Rate Limiter Class Initialization

        **Arguments:**

        - per_host_rate -> FLOAT: Requests per minute per host

        **Keyword arguments:**

        - window_s -> FLOAT: Length of the reference minute in seconds, *Default* = 60.0
        '''

        if per_host_rate <= 0:
            raise ConfigInvalid('per_host_rate must be positive (got %r)' %(per_host_rate))
        #end
        self.per_host_rate = float(per_host_rate)
        self.limit = max(1, int(math.floor(self.per_host_rate)))
        self.window_s = float(window_s)*self.limit/self.per_host_rate
        self._stamps = collections.defaultdict(collections.deque)
        self._locks = collections.defaultdict(asyncio.Lock)


    async def acquire(self, host):

        '''
        Wait until *host* has a free slot in the window, then take it

        Returns the seconds spent waiting.
        '''

        loop = asyncio.get_running_loop()
        start = loop.time()
        stamps = self._stamps[host]
        async with self._locks[host]:
            while True:
                now = loop.time()
                while stamps and (now - stamps[0] >= self.window_s):
                    stamps.popleft()
                #end
                if len(stamps) < self.limit:
                    stamps.append(now)
                    return now - start
                #end
                delay = self.window_s - (now - stamps[0])
                logger.debug('rate limit on %s, sleeping %.3f s', host, delay)
                await asyncio.sleep(delay)
            #end
        #end



# =============================================================================
# Egress Rotation Class
# =============================================================================
class EgressRotation(object):

    '''
    Round robin over the egress pool, None for an empty pool
    '''

    def __init__(self, pool):

        self.pool = list(pool or [])
        self._index = 0
        self._lock = threading.Lock()


    def next(self):

        if len(self.pool) == 0:
            return None
        #end
        with self._lock:
            egress = self.pool[self._index % len(self.pool)]
            self._index += 1
        #end

        return egress



# =============================================================================
# In Flight Gauge Class
# =============================================================================
class InFlightGauge(object):

    '''
    Counts sessions in flight and keeps the peak
    '''

    def __init__(self):

        self.current = 0
        self.peak = 0


    async def __aenter__(self):

        self.current += 1
        self.peak = max(self.peak, self.current)

        return self


    async def __aexit__(self, *args):

        self.current -= 1


def peak_window_count(times, window_s=60.0):

    '''
    Most request times falling in any half-open window of length window_s
    '''

    times = sorted(times)
    peak = 0
    first = 0
    for last in range(len(times)):
        while times[last] - times[first] >= window_s:
            first += 1
        #end
        peak = max(peak, last - first + 1)
    #end

    return peak



#==============================================================================
# Limiter Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Limiter...')
    limiter = RateLimiter(2, window_s=0.5)

    async def main():
        return [await limiter.acquire('isp') for i in range(5)]

    print(['%.2f' %(wait) for wait in asyncio.run(main())])
