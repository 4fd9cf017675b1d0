#!/usr/bin/env python

try:
    from .pySIM import SimFleet, SimTransport, build_fleet, load_scenarios
    from .simulator import SimScenario, SimEndpoint, synthesize_truth, UNSERVICEABLE
    __all__ = ['SimFleet','SimTransport','build_fleet','load_scenarios','SimScenario','SimEndpoint','synthesize_truth','UNSERVICEABLE']
except:
    __all__ = []
#end
