#!/usr/bin/env python
'''
pyBroadband_transport

Holds the Abstract Transport Class and the Pending Page Class.

A transport carries address submissions and action selections to an ISP
availability tool and hands back pages whose head is available at once and
whose body completes later.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 06/04/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Request Instrumentation and Rate Limiting Hook (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import asyncio
import logging

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import TransportError

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)


def address_request(address):

    '''
    Address form fields submitted to an availability tool
    '''

    return {'street':address.street, 'unit':address.unit, 'city':address.city,
        'state':address.state, 'zip':address.zip}


# =============================================================================
# Pending Page Class
# =============================================================================
class PendingPage(object):

    '''
    Page under load: head now, body parts as they arrive, completion event
    '''

    def __init__(self, session_id, head=''):

        self.session_id = session_id
        self.head = head
        self.throttle_ms = 0.0
        self._parts = []
        self.error = None
        self.completed = asyncio.Event()


    def feed(self, text):

        self._parts.append(text)


    def finish(self, text=''):

        if text:
            self._parts.append(text)
        #end
        self.completed.set()


    def fail(self, error):

        '''
        End the page with a TransportError the session reports
        '''

        self.error = error
        self.completed.set()


    def is_complete(self):

        return self.completed.is_set()


    def text(self):

        '''
        Page received so far (head plus body parts)
        '''

        return self.head + ''.join(self._parts)



# =============================================================================
# Transport Class
# =============================================================================
class Transport(object):

    '''
    Abstract Class for BAT Transport Objects
    '''

    def __init__(self, name='', limiter=None, *args, **kwargs):

        '''
        Transport Class Initialization

        **Keyword arguments:**

        - name -> STR: Transport name, *Default* = ''
        - limiter -> INST: Per host rate limiter awaited before every request, *Default* = None
        '''

        self.name = name
        self.limiter = limiter
        self.requests = {}
        self.request_log = []


    async def _on_submit(self, isp_name, address, egress):

        '''
        Submit an Address Form (Transport Specific Routine)

        **Arguments:**

        - isp_name -> STR: ISP endpoint
        - address -> INST: Address to submit
        - egress -> STR: Egress identity
        '''

        raise NotImplementedError()


    async def _on_act(self, isp_name, session_id, action, egress):

        '''
        Perform a Page Action (Transport Specific Routine)

        **Arguments:**

        - isp_name -> STR: ISP endpoint
        - session_id -> STR: Session opened by the submission
        - action -> INST: Action to perform
        - egress -> STR: Egress identity
        '''

        raise NotImplementedError()


    async def _on_end(self, isp_name, session_id):

        '''
        Release a Session at the Endpoint (Transport Specific Routine)

        Transports without server side sessions keep this no-op.
        '''

        pass


    async def _request(self, isp_name):

        # returns the rate limit wait in ms
        waited = 0.0
        if self.limiter is not None:
            waited = 1000.0*await self.limiter.acquire(isp_name)
        #end
        self.requests[isp_name] = self.requests.get(isp_name,0) + 1
        self.request_log.append((isp_name, asyncio.get_running_loop().time()))

        return waited


    async def submit(self, isp_name, address, egress=None):

        '''
        Submit an Address Form (Calling Routine)

        **Arguments:**

        - isp_name -> STR: ISP endpoint
        - address -> INST: Address to submit

        **Keyword arguments:**

        - egress -> STR: Egress identity, *Default* = None

        Returns a PendingPage.
        '''

        waited = await self._request(isp_name)
        try:
            page = await self._on_submit(isp_name, address, egress)
        except TransportError:
            raise
        except (OSError, asyncio.TimeoutError) as error:
            raise TransportError('Submission to %s failed: %s' %(isp_name,error), isp=isp_name)
        #end
        page.throttle_ms = waited

        return page


    async def act(self, isp_name, session_id, action, egress=None):

        '''
        Perform a Page Action (Calling Routine)

        **Arguments:**

        - isp_name -> STR: ISP endpoint
        - session_id -> STR: Session identifier
        - action -> INST: Action to perform

        **Keyword arguments:**

        - egress -> STR: Egress identity, *Default* = None

        Returns a PendingPage.
        '''

        waited = await self._request(isp_name)
        try:
            page = await self._on_act(isp_name, session_id, action, egress)
        except TransportError:
            raise
        except (OSError, asyncio.TimeoutError) as error:
            raise TransportError('Action on %s failed: %s' %(isp_name,error), isp=isp_name)
        #end
        page.throttle_ms = waited

        return page


    async def end(self, isp_name, session_id):

        '''
        Release a finished or abandoned session (Calling Routine)

        Not rate limited and not counted as a request. Failures are logged
        and dropped, the session outcome is already known.
        '''

        if session_id is None:
            return
        #end
        try:
            await self._on_end(isp_name, session_id)
        except (TransportError, OSError, asyncio.TimeoutError) as error:
            logger.debug('%s: releasing session %s failed: %s', isp_name, session_id, error)
        #end


    async def close(self):

        pass


    def total_requests(self):

        return sum(self.requests.values())
