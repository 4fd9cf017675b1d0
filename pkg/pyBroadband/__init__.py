#!/usr/bin/env python

import os,sys
import importlib

from .pyBroadband_error import BroadbandError
from .pyBroadband_options import Options
from .pyBroadband_plan import Plan, Technology
from .pyBroadband_address import Address, normalize, match_suggestion, hash_address
from .pyBroadband_adapter import AdapterSpec, TemplateKind, load_adapters
from .pyBroadband_session import Action, SessionState, QueryOutcome, OutcomeStatus
from .pyBroadband_transport import Transport
from .pyBroadband_engine import run_session
from .pyBroadband_history import Dataset, DatasetRecord
from .pyBroadband_limiter import RateLimiter, EgressRotation
from .pyBroadband_crawler import CrawlConfig, run_crawl, scale_experiment
from .pyBroadband_analysis import AnalysisReport, analyze
from .pyBroadband_release import release

__all__ = ['BroadbandError','Options','Plan','Technology','Address','normalize','match_suggestion','hash_address',
    'AdapterSpec','TemplateKind','load_adapters','Action','SessionState','QueryOutcome','OutcomeStatus','Transport',
    'run_session','Dataset','DatasetRecord','RateLimiter','EgressRotation','CrawlConfig','run_crawl',
    'scale_experiment','AnalysisReport','analyze','release']

dir = os.path.dirname(os.path.realpath(__file__))
for f in sorted(os.listdir(dir)):
    if f.startswith('py') and os.path.isdir(os.path.join(dir,f)):
        try:
            module = importlib.import_module('.%s' %(f), __name__)
            for name in module.__all__:
                globals()[name] = getattr(module, name)
            #end
            __all__.extend(module.__all__)
        except ImportError:
            continue
        #end
    #end
#end
