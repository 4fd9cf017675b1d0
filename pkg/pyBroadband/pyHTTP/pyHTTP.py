#!/usr/bin/env python
'''
pyHTTP - A Python pyBroadband HTTP transport.

Holds the HTTP Transport Class, which posts address forms and actions to
availability tool endpoints with aiohttp and streams each page: the head is
handed to the workflow engine as soon as it arrives, the body completes the
page later.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.0   $Date: 30/05/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import codecs
import asyncio
import logging

# =============================================================================
# External Python modules
# =============================================================================
import aiohttp
from tenacity import AsyncRetrying, stop_after_attempt, wait_exponential, retry_if_exception_type

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import TransportError
from pyBroadband.pyBroadband_transport import Transport, PendingPage, address_request

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

HEAD_END = b'</head>'


# =============================================================================
# HTTP Transport Class
# =============================================================================
class HttpTransport(Transport):

    '''
    Streaming HTTP transport to availability tool endpoints
    '''

    def __init__(self, urls, name='http', limiter=None, retries=3, timeout_s=300.0, *args, **kwargs):

        '''
        HTTP Transport Class Initialization

        **Arguments:**

        - urls -> DICT: ISP name -> base url

        **Keyword arguments:**

        - name -> STR: Transport name, *Default* = 'http'
        - limiter -> INST: RateLimiter, *Default* = None
        - retries -> INT: Connection attempts per request, *Default* = 3
        - timeout_s -> FLOAT: Total time allowed per response, *Default* = 300.0
        '''

        self.urls = dict(urls)
        self.retries = int(retries)
        self.timeout_s = timeout_s
        self._session = None
        self._tasks = set()
        Transport.__init__(self, name, limiter, *args, **kwargs)


    def _client(self):

        if (self._session is None) or self._session.closed:
            self._session = aiohttp.ClientSession(timeout=aiohttp.ClientTimeout(total=self.timeout_s))
        #end

        return self._session


    async def _post(self, isp_name, path, payload, egress):

        '''
        POST with connection retries, return a PendingPage
        '''

        if isp_name not in self.urls:
            raise TransportError('No endpoint url for %s' %(isp_name), isp=isp_name)
        #end
        headers = {}
        if egress is not None:
            headers['X-Egress'] = str(egress)
        #end

        # only refused connections are retried, the request never reached the tool
        async for attempt in AsyncRetrying(stop=stop_after_attempt(self.retries),
                wait=wait_exponential(multiplier=0.1, max=2.0),
                retry=retry_if_exception_type(aiohttp.ClientConnectorError), reraise=True):
            with attempt:
                response = await self._client().post(self.urls[isp_name] + path, json=payload, headers=headers)
            #end
        #end

        #
        if response.status != 200:
            text = await response.text()
            response.release()
            raise TransportError('%s %s answered %d: %s' %(isp_name,path,response.status,text.strip()), isp=isp_name)
        #end
        try:
            head = await response.content.readuntil(HEAD_END)
        except (aiohttp.ClientError, ValueError) as error:
            response.release()
            raise TransportError('%s %s sent no page head: %s' %(isp_name,path,error), isp=isp_name)
        #end
        pending = PendingPage(response.headers.get('X-Session-Id'), head.decode('utf-8'))
        task = asyncio.ensure_future(self._read_body(response, pending))
        self._tasks.add(task)
        task.add_done_callback(self._tasks.discard)

        return pending


    async def _read_body(self, response, pending):

        # characters may straddle chunk boundaries
        decoder = codecs.getincrementaldecoder('utf-8')()
        try:
            async for chunk in response.content.iter_any():
                pending.feed(decoder.decode(chunk))
            #end
            pending.finish(decoder.decode(b'', final=True))
        except UnicodeDecodeError as error:
            logger.warning('body of session %s is not utf-8: %s', pending.session_id, error)
            pending.fail(TransportError('Page body of session %s is not utf-8: %s' %(pending.session_id,error)))
        except (aiohttp.ClientError, asyncio.TimeoutError) as error:
            # page stays incomplete, the engine times out on it
            logger.warning('body of session %s broke off: %s', pending.session_id, error)
        finally:
            response.release()
        #end


    async def _on_submit(self, isp_name, address, egress):

        try:
            return await self._post(isp_name, '/query', address_request(address), egress)
        except aiohttp.ClientError as error:
            raise TransportError('Submission to %s failed: %s' %(isp_name,error), isp=isp_name)
        #end


    async def _on_act(self, isp_name, session_id, action, egress):

        try:
            return await self._post(isp_name, '/action', {'session_id':session_id, 'action':action.to_dict()}, egress)
        except aiohttp.ClientError as error:
            raise TransportError('Action on %s failed: %s' %(isp_name,error), isp=isp_name)
        #end


    async def _on_end(self, isp_name, session_id):

        if isp_name not in self.urls:
            return
        #end
        try:
            async with self._client().post(self.urls[isp_name] + '/close', json={'session_id':session_id}) as response:
                await response.read()
            #end
        except aiohttp.ClientError as error:
            raise TransportError('Closing session %s on %s failed: %s' %(session_id,isp_name,error), isp=isp_name)
        #end


    async def close(self):

        for task in list(self._tasks):
            task.cancel()
        #end
        self._tasks = set()
        if self._session is not None:
            await self._session.close()
            self._session = None
        #end
