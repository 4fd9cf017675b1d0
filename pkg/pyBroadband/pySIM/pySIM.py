#!/usr/bin/env python
'''
pySIM - A Python pyBroadband interface to the BAT simulator fleet.

Holds the Simulator Fleet Class, which serves one simulated ISP availability
tool per scenario (in process or over HTTP), and the Simulator Transport
Class, which lets the workflow engine query the fleet without sockets.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 25/05/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Per Endpoint Capacity Queueing (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import glob
import types
import asyncio
import logging

# =============================================================================
# External Python modules
# =============================================================================
from aiohttp import web

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import InvalidScenario, PortUnavailable, UnknownSession, UnknownAddress, \
    TransportError, FleetUnavailable
from pyBroadband.pyBroadband_transport import Transport, PendingPage, address_request
from pyBroadband.pySIM.simulator import SimScenario, SimEndpoint, UNSERVICEABLE

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

SCENARIOS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),'data','scenarios')


#==============================================================================
# load_scenarios function
#==============================================================================
def load_scenarios(paths=None):

    '''
    Load simulator scenarios from YAML files or directories of them

    **Keyword arguments:**

    - paths -> LIST: Files or directories, *Default* = None (shipped scenarios)
    '''

    if paths is None:
        paths = [SCENARIOS_DIR]
    elif isinstance(paths,str):
        paths = [paths]
    #end
    files = []
    for path in paths:
        if os.path.isdir(path):
            files.extend(sorted(glob.glob(os.path.join(path,'*.yaml'))))
        else:
            files.append(path)
        #end
    #end

    return [SimScenario.load(filename) for filename in files]


# =============================================================================
# Simulator Fleet Class
# =============================================================================
class SimFleet(object):

    '''
    One simulated availability tool per ISP
    '''

    def __init__(self, endpoints, test_mode=False):

        '''
        Simulator Fleet Class Initialization

        **Arguments:**

        - endpoints -> DICT: ISP name -> SimEndpoint

        **Keyword arguments:**

        - test_mode -> BOOL: Serve GET /truth on every endpoint, *Default* = False
        '''

        self.endpoints = endpoints
        self.test_mode = test_mode
        self.urls = {}
        self._runners = []
        self._slots = {}


    def isp_names(self):

        return sorted(self.endpoints.keys())


    def endpoint(self, isp_name):

        if isp_name not in self.endpoints:
            raise FleetUnavailable('No simulated endpoint for %s (fleet serves %s)' %(isp_name,self.isp_names()), isp=isp_name)
        #end

        return self.endpoints[isp_name]


    def _slot(self, isp_name):

        # semaphores bind to the running loop
        loop = asyncio.get_running_loop()
        entry = self._slots.get(isp_name)
        if (entry is None) or (entry[0] is not loop):
            capacity = self.endpoints[isp_name].scenario.capacity
            entry = (loop, asyncio.Semaphore(int(capacity)) if capacity else None)
            self._slots[isp_name] = entry
        #end

        return entry[1]


    async def serve_page(self, isp_name, page, pending=None, response=None):

        '''
        Hold the body of a page for its service time, queueing on capacity

        **Arguments:**

        - isp_name -> STR: Endpoint
        - page -> INST: SimPage

        **Keyword arguments:**

        - pending -> INST: PendingPage finished with the body, *Default* = None
        - response -> INST: aiohttp StreamResponse the body is written to, *Default* = None
        '''

        slot = self._slot(isp_name)
        if slot is not None:
            async with slot:
                await asyncio.sleep(page.service_ms/1000.0)
            #end
        else:
            await asyncio.sleep(page.service_ms/1000.0)
        #end
        if pending is not None:
            pending.finish(page.body)
        #end
        if response is not None:
            await response.write(page.body.encode('utf-8'))
        #end


    # -------------------------------------------------------------------------
    # HTTP service
    # -------------------------------------------------------------------------

    def _application(self, isp_name):

        endpoint = self.endpoints[isp_name]
        app = web.Application()

        async def stream(request, page):
            response = web.StreamResponse(headers={'Content-Type':'text/html; charset=utf-8',
                'X-Session-Id':page.session_id, 'X-Template':page.kind.value})
            await response.prepare(request)
            await response.write(page.head.encode('utf-8'))
            await self.serve_page(isp_name, page, response=response)
            await response.write_eof()
            return response

        async def query(request):
            form = await request.json()
            if ('street' not in form) or ('zip' not in form):
                return web.json_response({'error':'address form needs street and zip'}, status=400)
            #end
            return await stream(request, endpoint.open(form))

        async def action(request):
            data = await request.json()
            try:
                page = endpoint.respond(data.get('session_id'), data.get('action') or {})
            except UnknownSession as error:
                return web.json_response({'error':str(error)}, status=404)
            #end
            return await stream(request, page)

        async def close(request):
            data = await request.json()
            endpoint.close(data.get('session_id'))
            return web.json_response({'closed':data.get('session_id')})

        async def truth(request):
            if not (self.test_mode or endpoint.scenario.test_mode):
                raise web.HTTPNotFound()
            #end
            query = types.SimpleNamespace(street=request.query.get('street',''), zip=request.query.get('zip',''))
            try:
                plans = endpoint.ground_truth(query)
            except (UnknownAddress, ValueError) as error:
                return web.json_response({'error':str(error)}, status=404)
            #end
            if plans == UNSERVICEABLE:
                return web.json_response({'status':UNSERVICEABLE})
            #end
            return web.json_response({'status':'Plans', 'plans':[plan.to_dict() for plan in plans]})

        app.router.add_post('/query', query)
        app.router.add_post('/action', action)
        app.router.add_post('/close', close)
        app.router.add_get('/truth', truth)

        return app


    async def serve(self, host='127.0.0.1', ports=None):

        '''
        Start one HTTP endpoint per ISP, return ISP name -> base url

        **Keyword arguments:**

        - host -> STR: Bind address, *Default* = '127.0.0.1'
        - ports -> DICT: ISP name -> port, *Default* = None (OS assigned)
        '''

        ports = ports or {}
        for isp_name in self.isp_names():
            runner = web.AppRunner(self._application(isp_name))
            await runner.setup()
            site = web.TCPSite(runner, host, int(ports.get(isp_name,0)))
            try:
                await site.start()
            except OSError as error:
                await runner.cleanup()
                await self.stop()
                raise PortUnavailable('Cannot bind %s on %s:%s: %s' %(isp_name,host,ports.get(isp_name,0),error), isp=isp_name)
            #end
            self._runners.append(runner)
            port = runner.addresses[0][1]
            self.urls[isp_name] = 'http://%s:%d' %(host,port)
            logger.info('%s simulator serving on %s', isp_name, self.urls[isp_name])
        #end

        return dict(self.urls)


    async def stop(self):

        for runner in self._runners:
            await runner.cleanup()
        #end
        self._runners = []
        self.urls = {}


    def __str__(self):

        text = '\nSimulator Fleet -- %d endpoints\n%s\n' %(len(self.endpoints),'='*60)
        for isp_name in self.isp_names():
            scenario = self.endpoints[isp_name].scenario
            text += '    %-14s truth %6d  capacity %-6s %s\n' %(isp_name, len(scenario.truth),
                scenario.capacity or '-', self.urls.get(isp_name,'in-process'))
        #end

        return text



#==============================================================================
# build_fleet function
#==============================================================================
def build_fleet(scenarios, seed=0, addresses=None, test_mode=False):

    '''
    Build the simulator fleet, one endpoint per scenario

    Endpoints answer in process at once; SimFleet.serve() puts them on HTTP.

    **Arguments:**

    - scenarios -> LIST: SimScenario instances with distinct isp_names

    **Keyword arguments:**

    - seed -> INT: Fleet seed, *Default* = 0
    - addresses -> LIST: Addresses to synthesize truth for where a scenario has none, *Default* = None
    - test_mode -> BOOL: Serve GET /truth, *Default* = False
    '''

    #
    if len(scenarios) == 0:
        raise InvalidScenario('A simulator fleet needs at least one scenario')
    #end
    names = [scenario.isp_name for scenario in scenarios]
    if len(set(names)) != len(names):
        raise InvalidScenario('Scenario isp_names must be distinct (got %s)' %(names))
    #end

    #
    endpoints = {}
    for scenario in scenarios:
        if (len(scenario.truth) == 0) and (addresses is not None):
            scenario.with_truth(addresses, seed)
        #end
        endpoints[scenario.isp_name] = SimEndpoint(scenario, seed)
    #end

    return SimFleet(endpoints, test_mode)


# =============================================================================
# Simulator Transport Class
# =============================================================================
class SimTransport(Transport):

    '''
    In process transport to a SimFleet
    '''

    def __init__(self, fleet, name='sim', limiter=None, *args, **kwargs):

        '''
        Simulator Transport Class Initialization

        **Arguments:**

        - fleet -> INST: SimFleet

        **Keyword arguments:**

        - name -> STR: Transport name, *Default* = 'sim'
        - limiter -> INST: RateLimiter, *Default* = None
        '''

        self.fleet = fleet
        self._tasks = set()
        Transport.__init__(self, name, limiter, *args, **kwargs)


    def _deliver(self, isp_name, page):

        pending = PendingPage(page.session_id, page.head)
        task = asyncio.ensure_future(self.fleet.serve_page(isp_name, page, pending))
        self._tasks.add(task)
        task.add_done_callback(self._tasks.discard)

        return pending


    async def _on_submit(self, isp_name, address, egress):

        try:
            endpoint = self.fleet.endpoint(isp_name)
        except FleetUnavailable as error:
            raise TransportError(str(error), isp=isp_name)
        #end

        return self._deliver(isp_name, endpoint.open(address_request(address)))


    async def _on_act(self, isp_name, session_id, action, egress):

        try:
            page = self.fleet.endpoint(isp_name).respond(session_id, action.to_dict())
        except (UnknownSession, FleetUnavailable) as error:
            raise TransportError(str(error), isp=isp_name)
        #end

        return self._deliver(isp_name, page)


    async def _on_end(self, isp_name, session_id):

        try:
            self.fleet.endpoint(isp_name).close(session_id)
        except FleetUnavailable as error:
            raise TransportError(str(error), isp=isp_name)
        #end


    async def close(self):

        for task in list(self._tasks):
            task.cancel()
        #end
        self._tasks = set()



#==============================================================================
# pySIM Test
#==============================================================================
if __name__ == '__main__':

    print('Testing pySIM...')
    fleet = build_fleet(load_scenarios())
    print(fleet)
