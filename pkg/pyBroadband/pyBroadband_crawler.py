#!/usr/bin/env python
'''
pyBroadband_crawler

Holds the Crawl Configuration Class, the crawl driver that runs every
(address, ISP) session through a bounded worker pool into the dataset, and
the worker count scaling experiment.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.2   $Date: 08/06/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Resumable Crawls (2023)
    v. 1.2  - Scaling Experiment (2023)

To Do:
    - coverage only restricts ISPs by city; per block group coverage
      would need the BAT footprint files
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import time
import asyncio
import logging

# =============================================================================
# External Python modules
# =============================================================================
import numpy

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import ConfigInvalid, FleetUnavailable, BroadbandError
from pyBroadband.pyBroadband_options import Options
from pyBroadband.pyBroadband_adapter import load_adapters, ADAPTERS_DIR
from pyBroadband.pyBroadband_engine import run_session, hit_rate, serviceability_rate
from pyBroadband.pyBroadband_session import QueryOutcome, OutcomeStatus, write_transcripts
from pyBroadband.pyBroadband_history import Dataset, DatasetRecord
from pyBroadband.pyBroadband_limiter import RateLimiter, EgressRotation, InFlightGauge, peak_window_count
from pyBroadband.pyBroadband_sampler import load_addresses
from pyBroadband.pyBroadband_stats import ks_two_sided

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

MAX_WORKERS = 200
WORKER_COUNTS = (1, 50, 100, 200)
TRANSPORTS = ('sim', 'http')
FAILURE_REASONS = ('transport', 'error')


# =============================================================================
# Crawl Configuration Class
# =============================================================================
class CrawlConfig(Options):

    '''
    Crawl Options
    '''

    def __init__(self, *args, **kwargs):

        '''
        Crawl Configuration Class Initialization

        **Keyword arguments:**

        - options -> DICT: Option values applied through setOption, *Default* = {}
        '''

        def_opts = {
        'adapters':[list,[]],           # adapter files or directories, [] = shipped adapters
        'targets':[str,''],             # sample plan (address CSV)
        'workers':[int,50],             # sessions in flight
        'per_host_rate':[float,60.0],   # requests per minute per ISP endpoint
        'window_s':[float,60.0],        # rate limit window
        'egress_pool':[list,[]],        # opaque egress identities
        'seed':[int,0],
        'output_path':[str,'dataset.jsonl'],
        'transcripts':[bool,True],      # write <output>_transcripts.jsonl
        'isps':[list,[]],               # ISPs to query, [] = every adapter
        'coverage':[dict,{}],           # city -> ISPs serving it, absent cities get every ISP
        'transport':[str,'sim'],        # sim or http
        'scenarios':[list,[]],          # simulator scenario files or directories, [] = shipped scenarios
        'endpoints':[dict,{}],          # ISP -> base url for the http transport
        'resolution_ms':[float,50.0],   # scaling experiment response time resolution
        }
        Options.__init__(self, 'Crawl', def_opts, *args, **kwargs)


    def _on_setOption(self, name, value):

        if (name == 'workers') and not (1 <= value <= MAX_WORKERS):
            raise ConfigInvalid('workers must lie in [1, %d] (got %d)' %(MAX_WORKERS,value))
        elif (name in ('per_host_rate','window_s','resolution_ms')) and (value <= 0):
            raise ConfigInvalid('%s must be positive (got %r)' %(name,value))
        elif (name == 'transport') and (value not in TRANSPORTS):
            raise ConfigInvalid('transport %r not understood - use sim or http' %(value))
        #end


    def transcripts_path(self):

        root, ext = os.path.splitext(self.resolve(self.getOption('output_path')))

        return root + '_transcripts.jsonl'


    def load_adapters(self):

        '''
        Adapter specifications to crawl, filtered by the isps option
        '''

        paths = [self.resolve(path) for path in self.getOption('adapters')] or [ADAPTERS_DIR]
        adapters = load_adapters(paths)
        isps = self.getOption('isps')
        if isps:
            missing = sorted(set(isps) - set([adapter.isp_name for adapter in adapters]))
            if missing:
                raise ConfigInvalid('No adapter for ISPs %s' %(missing))
            #end
            adapters = [adapter for adapter in adapters if adapter.isp_name in isps]
        #end

        return adapters


    def load_targets(self):

        targets = self.getOption('targets')
        if targets == '':
            raise ConfigInvalid('Crawl configuration needs a targets file')
        #end

        return load_addresses(self.resolve(targets))



def crawl_pairs(addresses, adapters, coverage=None, completed=None):

    '''
    (address, adapter) pairs to query, skipping completed and uncovered ones
    '''

    coverage = coverage or {}
    completed = completed or set()
    pairs = []
    for address in addresses:
        for adapter in adapters:
            if (address.city in coverage) and (adapter.isp_name not in coverage[address.city]):
                continue
            #end
            if (address.address_id, adapter.isp_name) in completed:
                continue
            #end
            pairs.append((address, adapter))
        #end
    #end

    return pairs


# =============================================================================
# Crawl Summary Class
# =============================================================================
class CrawlSummary(object):

    '''
    Per ISP hit rates and query time quantiles of a crawl
    '''

    def __init__(self, outcomes, skipped=0, peak_in_flight=0, requests=None, peak_rate=None, elapsed_s=0.0):

        self.outcomes = outcomes
        self.skipped = skipped
        self.peak_in_flight = peak_in_flight
        self.requests = dict(requests or {})
        self.peak_rate = dict(peak_rate or {})
        self.elapsed_s = elapsed_s
        self.by_isp = {}
        for outcome in outcomes:
            self.by_isp.setdefault(outcome.isp_name, []).append(outcome)
        #end


    def hit_rate(self, isp=None):

        return hit_rate(self.by_isp[isp] if isp is not None else self.outcomes)


    def quantiles(self, isp, q=(50, 90, 99)):

        times = [outcome.total_ms for outcome in self.by_isp[isp]]

        return dict((p, float(numpy.percentile(times, p))) for p in q)


    def failures(self):

        return [outcome for outcome in self.outcomes if outcome.reason in FAILURE_REASONS]


    def misses(self):

        counts = {}
        for outcome in self.outcomes:
            if outcome.status == OutcomeStatus.MISS:
                counts[outcome.reason] = counts.get(outcome.reason,0) + 1
            #end
        #end

        return counts


    def __str__(self):

        '''
        Print Structured Crawl Summary
        '''

        text = '\nCrawl Summary\n%s\n' %('='*78)
        text += '    Sessions: %d    Resumed (skipped): %d    Peak in flight: %d    Elapsed: %.1f s\n\n' %(
            len(self.outcomes), self.skipped, self.peak_in_flight, self.elapsed_s)
        text += '    %-14s %8s %9s %9s %10s %10s %10s %9s\n' %('ISP','Queries','Hit Rate','Answered',
            'p50 (ms)','p90 (ms)','p99 (ms)','Peak/min')
        for isp in sorted(self.by_isp.keys()):
            outcomes = self.by_isp[isp]
            q = self.quantiles(isp)
            text += '    %-14s %8d %9.3f %9.3f %10.1f %10.1f %10.1f %9s\n' %(isp, len(outcomes), hit_rate(outcomes),
                serviceability_rate(outcomes), q[50], q[90], q[99], self.peak_rate.get(isp,'-'))
        #end
        misses = self.misses()
        if misses:
            text += '\n    Misses: %s\n' %(', '.join(['%s %d' %(reason, misses[reason]) for reason in sorted(misses.keys())]))
        #end

        return text


    def write2file(self, outfile):

        if isinstance(outfile,str):
            with open(outfile,'a',encoding='utf-8') as fid:
                fid.write(self.__str__())
            #end
        else:
            outfile.write(self.__str__())
        #end



#==============================================================================
# execute function
#==============================================================================
async def execute(pairs, transport, workers, seed=0, egress=None, sink=None):

    '''
    Run sessions through a pool of *workers* executors

    A session error that is not already a miss becomes Miss("error"); the
    crawl never aborts on one session.

    **Arguments:**

    - pairs -> LIST: (Address, AdapterSpec) pairs
    - transport -> INST: Transport instance
    - workers -> INT: Executors in the pool

    **Keyword arguments:**

    - seed -> INT: Session seed, *Default* = 0
    - egress -> INST: EgressRotation, *Default* = None
    - sink -> FUNC: Called with (address, outcome) as each session ends, *Default* = None

    Returns (outcomes in pair order, InFlightGauge).
    '''

    queue = asyncio.Queue()
    for i in range(len(pairs)):
        queue.put_nowait(i)
    #end
    outcomes = [None]*len(pairs)
    gauge = InFlightGauge()
    if egress is None:
        egress = EgressRotation([])
    #end

    async def worker():
        while True:
            try:
                i = queue.get_nowait()
            except asyncio.QueueEmpty:
                return
            #end
            address, adapter = pairs[i]
            identity = egress.next()
            async with gauge:
                try:
                    outcome = await run_session(address, adapter, transport, seed, identity)
                except (BroadbandError, ValueError, KeyError):
                    logger.exception('%s %s: session failed', adapter.isp_name, address.address_id)
                    outcome = QueryOutcome.miss('error', address=address, isp_name=adapter.isp_name, egress=identity)
                #end
            #end
            outcomes[i] = outcome
            if sink is not None:
                sink(address, outcome)
            #end
        #end

    await asyncio.gather(*[worker() for k in range(min(workers, max(1,len(pairs))))])

    return outcomes, gauge


def _transport(config, addresses, fleet=None):

    limiter = RateLimiter(config.getOption('per_host_rate'), config.getOption('window_s'))
    if config.getOption('transport') == 'http':
        from pyBroadband.pyHTTP import HttpTransport
        endpoints = config.getOption('endpoints')
        if not endpoints:
            raise ConfigInvalid('The http transport needs endpoints (ISP -> base url)')
        #end
        return HttpTransport(endpoints, limiter=limiter)
    #end
    from pyBroadband.pySIM import build_fleet, load_scenarios, SimTransport
    if fleet is None:
        paths = [config.resolve(path) for path in config.getOption('scenarios')] or None
        fleet = build_fleet(load_scenarios(paths), config.getOption('seed'), addresses=addresses)
    #end

    return SimTransport(fleet, limiter=limiter)


#==============================================================================
# run_crawl function
#==============================================================================
def run_crawl(config, fleet=None, transport=None):

    '''
    Crawl every (address, ISP) pair into the dataset

    Pairs already in the dataset are skipped, so a killed crawl resumes
    where it stopped. Pairs that last failed in transport or with an
    error are queried again.

    **Arguments:**

    - config -> INST: CrawlConfig

    **Keyword arguments:**

    - fleet -> INST: SimFleet for the sim transport, *Default* = None (built from the scenarios)
    - transport -> INST: Transport overriding the configured one, *Default* = None
    '''

    #
    adapters = config.load_adapters()
    addresses = config.load_targets()
    output = config.resolve(config.getOption('output_path'))
    dataset = Dataset(output,'a')
    try:
        completed = dataset.completed_pairs()
        pairs = crawl_pairs(addresses, adapters, config.getOption('coverage'), completed)
        skipped = len(crawl_pairs(addresses, adapters, config.getOption('coverage'))) - len(pairs)
        logger.info('crawling %d pairs with %d workers (%d already recorded)', len(pairs),
            config.getOption('workers'), skipped)
        if transport is None:
            transport = _transport(config, addresses, fleet)
        elif transport.limiter is None:
            transport.limiter = RateLimiter(config.getOption('per_host_rate'), config.getOption('window_s'))
        #end
        transcripts = config.transcripts_path() if config.getOption('transcripts') else None

        def sink(address, outcome):
            dataset.write(DatasetRecord.from_outcome(outcome, address))
            if transcripts is not None:
                write_transcripts([outcome], transcripts)
            #end

        async def main():
            try:
                return await execute(pairs, transport, config.getOption('workers'), config.getOption('seed'),
                    EgressRotation(config.getOption('egress_pool')), sink)
            finally:
                await transport.close()
            #end

        start = time.time()
        outcomes, gauge = asyncio.run(main())
    finally:
        dataset.close()
    #end

    #
    peak_rate = {}
    for isp in set([entry[0] for entry in transport.request_log]):
        peak_rate[isp] = peak_window_count([t for name, t in transport.request_log if name == isp],
            config.getOption('window_s'))
    #end

    return CrawlSummary(outcomes, skipped, gauge.peak, transport.requests, peak_rate, time.time() - start)


# =============================================================================
# Scale Report Class
# =============================================================================
class ScaleReport(object):

    '''
    Response time samples per worker count with pairwise two-sided KS tests
    '''

    def __init__(self, samples, resolution_ms, peaks=None, alpha=0.05):

        self.worker_counts = sorted(samples.keys())
        self.samples = samples
        self.resolution_ms = resolution_ms
        self.peaks = dict(peaks or {})
        self.tests = {}
        for i in range(len(self.worker_counts)):
            for j in range(i+1,len(self.worker_counts)):
                a = self.worker_counts[i]
                b = self.worker_counts[j]
                self.tests[(a,b)] = ks_two_sided(samples[a], samples[b], alpha)
            #end
        #end


    def rejections(self):

        return [pair for pair in sorted(self.tests.keys()) if self.tests[pair].reject]


    def __str__(self):

        text = '\nScale Experiment (resolution %.0f ms)\n%s\n' %(self.resolution_ms,'='*60)
        text += '    %8s %8s %12s %12s %10s\n' %('Workers','Peak','Median (ms)','p90 (ms)','Sessions')
        for w in self.worker_counts:
            values = self.samples[w]
            text += '    %8d %8s %12.1f %12.1f %10d\n' %(w, self.peaks.get(w,'-'), numpy.median(values),
                numpy.percentile(values,90), len(values))
        #end
        if self.tests:
            text += '\n    %8s %8s %8s %10s %8s\n' %('A','B','D','p','Reject')
            for pair in sorted(self.tests.keys()):
                result = self.tests[pair]
                text += '    %8d %8d %8.3f %10.4f %8s\n' %(pair[0], pair[1], result.d_statistic, result.p_value,
                    'yes' if result.reject else 'no')
            #end
        #end

        return text


    def write2file(self, outfile):

        if isinstance(outfile,str):
            with open(outfile,'a',encoding='utf-8') as fid:
                fid.write(self.__str__())
            #end
        else:
            outfile.write(self.__str__())
        #end



def quantize(times_ms, resolution_ms):

    '''
    Response times rounded to the nearest multiple of the resolution
    '''

    times = numpy.asarray(times_ms, dtype=float)

    return numpy.round(times/resolution_ms)*resolution_ms


#==============================================================================
# scale_experiment function
#==============================================================================
def scale_experiment(config, worker_counts=WORKER_COUNTS, fleet=None, addresses=None):

    '''
    Repeat one crawl at every worker count and compare response times

    Nothing is written to the dataset. Every run uses the same targets,
    adapters and seed against the same fleet.

    **Arguments:**

    - config -> INST: CrawlConfig

    **Keyword arguments:**

    - worker_counts -> LIST: Worker counts, *Default* = (1, 50, 100, 200)
    - fleet -> INST: Running SimFleet, *Default* = None (built from the scenarios)
    - addresses -> LIST: Targets overriding the configured file, *Default* = None
    '''

    #
    adapters = config.load_adapters()
    if addresses is None:
        addresses = config.load_targets()
    #end
    if config.getOption('transport') == 'sim':
        if fleet is None:
            from pyBroadband.pySIM import build_fleet, load_scenarios
            paths = [config.resolve(path) for path in config.getOption('scenarios')] or None
            fleet = build_fleet(load_scenarios(paths), config.getOption('seed'), addresses=addresses)
        #end
        for adapter in adapters:
            fleet.endpoint(adapter.isp_name)
        #end
    #end
    pairs = crawl_pairs(addresses, adapters, config.getOption('coverage'))
    if len(pairs) == 0:
        raise FleetUnavailable('Scale experiment has no (address, ISP) pairs to query')
    #end

    #
    samples = {}
    peaks = {}
    for w in sorted(set(worker_counts)):
        if not (1 <= w <= MAX_WORKERS):
            raise ConfigInvalid('worker count %d outside [1, %d]' %(w,MAX_WORKERS))
        #end
        transport = _transport(config, addresses, fleet)

        async def main():
            try:
                return await execute(pairs, transport, w, config.getOption('seed'),
                    EgressRotation(config.getOption('egress_pool')))
            finally:
                await transport.close()
            #end

        outcomes, gauge = asyncio.run(main())
        failed = [outcome for outcome in outcomes if outcome.reason == 'transport']
        if len(failed) == len(outcomes):
            raise FleetUnavailable('Every session failed in transport at %d workers' %(w))
        #end
        samples[w] = quantize([outcome.total_ms for outcome in outcomes], config.getOption('resolution_ms'))
        peaks[w] = gauge.peak
        logger.info('%d workers: median %.1f ms, peak in flight %d', w, numpy.median(samples[w]), gauge.peak)
    #end

    return ScaleReport(samples, config.getOption('resolution_ms'), peaks)
