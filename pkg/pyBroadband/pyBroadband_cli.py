#!/usr/bin/env python
'''
pyBroadband_cli

Command line surface: crawl, simulate, sample, scale-test, analyze, release,
plot and fixture subcommands.

Exit codes: 0 success, 1 configuration or input error, 2 crawl finished with
transport or session failures recorded.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 17/06/2023 21:00$


History
-------
    v. 1.0  - Initial Command Line (2023)
    v. 1.1  - Added plot and fixture Subcommands (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import asyncio
import argparse
import logging

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import BroadbandError, WeakSalt
from pyBroadband.pyBroadband_crawler import CrawlConfig, run_crawl, scale_experiment, WORKER_COUNTS
from pyBroadband.pyBroadband_sampler import load_addresses, build_sample_plan, DEFAULT_RATE, DEFAULT_FLOOR
from pyBroadband.pyBroadband_analysis import analyze
from pyBroadband.pyBroadband_release import release

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2


def worker_counts(text):

    try:
        counts = [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('worker counts must be comma separated integers (got %r)' %(text))
    #end
    if len(counts) == 0:
        raise argparse.ArgumentTypeError('at least one worker count is needed')
    #end

    return counts


def _write(result, out):

    print(result)
    if out:
        result.write2file(out)
    #end


# =============================================================================
# Subcommands
# =============================================================================
def cmd_crawl(args):

    config = CrawlConfig.load(args.config)
    if args.workers is not None:
        config.setOption('workers', args.workers)
    #end
    summary = run_crawl(config)
    _write(summary, args.summary)
    failures = summary.failures()
    if failures:
        logger.warning('%d sessions ended in transport or session failures', len(failures))
        return EXIT_PARTIAL
    #end

    return EXIT_OK


def cmd_simulate(args):

    from pyBroadband.pySIM import build_fleet, load_scenarios

    addresses = load_addresses(args.addresses) if args.addresses else None
    fleet = build_fleet(load_scenarios(args.scenarios or None), args.seed, addresses=addresses,
        test_mode=args.test_mode)

    async def serve():
        urls = await fleet.serve(args.host, dict((isp, args.port + k) for k, isp in enumerate(fleet.isp_names()))
            if args.port else None)
        print(fleet)
        for isp in sorted(urls.keys()):
            print('%s %s' %(isp, urls[isp]))
        #end
        sys.stdout.flush()
        try:
            await asyncio.Event().wait()
        finally:
            await fleet.stop()
        #end

    try:
        asyncio.run(serve())
    except KeyboardInterrupt:
        logger.info('simulator fleet stopped')
    #end

    return EXIT_OK


def cmd_sample(args):

    plan = build_sample_plan(load_addresses(args.addresses), args.rate, args.floor, args.seed)
    if args.out:
        plan.write(args.out)
    #end
    print(plan)

    return EXIT_OK


def cmd_scale_test(args):

    config = CrawlConfig.load(args.config)
    report = scale_experiment(config, args.workers)
    _write(report, args.out)

    return EXIT_OK


def cmd_analyze(args):

    report = analyze(args.dataset, args.income, args.adjacency, args.out, permutations=args.permutations,
        seed=args.seed, basis=args.basis, min_groups=args.min_groups, prune_quantile=args.prune_quantile,
        fiber_threshold_mbps=args.fiber_threshold)
    print(report)

    return EXIT_OK


def cmd_release(args):

    salt = os.environ.get(args.salt_env)
    if not salt:
        raise WeakSalt('Environment variable %s holds no salt' %(args.salt_env))
    #end
    print(release(args.dataset, salt, args.out))

    return EXIT_OK


def cmd_plot(args):

    from pyBroadband.pyBroadband_plots import plot_analysis

    for filename in plot_analysis(args.analysis, args.out):
        print(filename)
    #end

    return EXIT_OK


def cmd_fixture(args):

    from pyBroadband.pyBroadband_synthetic import three_city_fixture, fixture_records, write_fixture

    cities = three_city_fixture(args.seed)
    paths = write_fixture(args.out, cities, fixture_records(cities, args.seed))
    for key in sorted(paths.keys()):
        print('%-10s %s' %(key, paths[key]))
    #end

    return EXIT_OK


#==============================================================================
# parser function
#==============================================================================
def parser():

    main = argparse.ArgumentParser(prog='pybroadband', description='Broadband availability tool crawler and plan analytics')
    main.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    sub = main.add_subparsers(dest='command', required=True)

    p = sub.add_parser('crawl', help='query every target address at every ISP into the dataset (resumes, retrying transport misses)')
    p.add_argument('--config', required=True, help='crawl configuration (YAML)')
    p.add_argument('--workers', type=int, default=None, help='override the configured worker count')
    p.add_argument('--summary', default=None, help='append the crawl summary to this file')
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser('simulate', help='serve the simulator fleet over HTTP until interrupted')
    p.add_argument('--scenarios', nargs='*', default=[], help='scenario files or directories (default: shipped)')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--addresses', default=None, help='address CSV to synthesize ground truth for')
    p.add_argument('--host', default='127.0.0.1')
    p.add_argument('--port', type=int, default=0, help='first port, one per ISP (default: OS assigned)')
    p.add_argument('--test-mode', action='store_true', help='expose GET /truth')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('sample', help='draw the per block group address sample')
    p.add_argument('--addresses', required=True, help='address CSV')
    p.add_argument('--rate', type=float, default=DEFAULT_RATE)
    p.add_argument('--floor', type=int, default=DEFAULT_FLOOR)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out', default=None, help='write the chosen addresses (crawl targets CSV)')
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser('scale-test', help='compare response times across worker counts')
    p.add_argument('--config', required=True, help='crawl configuration (YAML)')
    p.add_argument('--workers', type=worker_counts, default=list(WORKER_COUNTS), help='comma separated worker counts')
    p.add_argument('--out', default=None, help='append the report to this file')
    p.set_defaults(func=cmd_scale_test)

    p = sub.add_parser('analyze', help='run the plan analytics on a dataset')
    p.add_argument('--dataset', required=True)
    p.add_argument('--income', required=True, help='block group income CSV')
    p.add_argument('--adjacency', required=True, help='edge list CSV or GeoJSON polygons')
    p.add_argument('--out', required=True, help='output directory')
    p.add_argument('--permutations', type=int, default=999)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--basis', choices=['download','upload'], default='download')
    p.add_argument('--min-groups', type=int, default=5)
    p.add_argument('--prune-quantile', type=float, default=None)
    p.add_argument('--fiber-threshold', type=float, default=None, help='Mbps counted as fiber regardless of label')
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser('release', help='write the hashed public dataset')
    p.add_argument('--dataset', required=True)
    p.add_argument('--salt-env', required=True, help='environment variable holding the salt')
    p.add_argument('--out', default=None)
    p.set_defaults(func=cmd_release)

    p = sub.add_parser('plot', help='render CDF figures from an analysis directory')
    p.add_argument('--analysis', required=True)
    p.add_argument('--out', default=None)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser('fixture', help='write the synthetic three city fixture')
    p.add_argument('--out', required=True)
    p.add_argument('--seed', type=int, default=0)
    p.set_defaults(func=cmd_fixture)

    return main


#==============================================================================
# main function
#==============================================================================
def main(argv=None):

    args = parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        return args.func(args)
    except (BroadbandError, OSError, ImportError) as error:
        logger.error('%s', error)
        return EXIT_CONFIG
    #end



#==============================================================================
# CLI Test
#==============================================================================
if __name__ == '__main__':

    sys.exit(main())
