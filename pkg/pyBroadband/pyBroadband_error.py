#!/usr/bin/env python
'''
pyBroadband_error

Holds the pyBroadband Exception Classes.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.0   $Date: 14/03/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
'''

__version__ = '$Revision: $'


# =============================================================================
# Base Class
# =============================================================================
class BroadbandError(Exception):

    '''
    Base Class for all pyBroadband Errors

    Errors raised inside the analysis pipeline carry the (city, isp) pair
    they were raised for.
    '''

    def __init__(self, message='', city=None, isp=None):

        Exception.__init__(self, message)
        self.message = message
        self.city = city
        self.isp = isp


    def tag(self, city=None, isp=None):

        '''
        Attach analysis context and return the error

        **Keyword arguments:**

        - city -> STR: City name, *Default* = None
        - isp -> STR: ISP name, *Default* = None
        '''

        if city is not None:
            self.city = city
        #end
        if isp is not None:
            self.isp = isp
        #end

        return self


    def __str__(self):

        if (self.city is None) and (self.isp is None):
            return self.message
        #end

        return '%s [city=%s, isp=%s]' %(self.message, self.city, self.isp)



# =============================================================================
# Address Matcher Errors
# =============================================================================
class InvalidAddress(BroadbandError, ValueError):
    pass

class EmptyStreet(InvalidAddress):
    pass

class WeakSalt(BroadbandError, ValueError):
    pass


# =============================================================================
# Workflow Engine Errors
# =============================================================================
class InvalidAdapter(BroadbandError, ValueError):
    pass

class InvalidPlan(BroadbandError, ValueError):
    pass

class StepBudgetExceeded(BroadbandError):
    pass

class TimeoutExpired(BroadbandError):
    pass

class TransportError(BroadbandError, IOError):
    pass

class EmptyInput(BroadbandError, ValueError):
    pass


# =============================================================================
# Simulator Errors
# =============================================================================
class InvalidScenario(BroadbandError, ValueError):
    pass

class PortUnavailable(BroadbandError, IOError):
    pass

class UnknownSession(BroadbandError, KeyError):
    pass

class UnknownAddress(BroadbandError, KeyError):
    pass


# =============================================================================
# Ingest Errors
# =============================================================================
class FileMissing(BroadbandError, FileNotFoundError):
    pass

class MalformedHeader(BroadbandError, ValueError):
    pass

class ConflictingDuplicate(BroadbandError, ValueError):
    pass

class AsymmetryAfterClose(BroadbandError, ValueError):
    pass

class EmptyBlockGroup(BroadbandError, ValueError):
    pass


# =============================================================================
# Metrics Errors
# =============================================================================
class NonPositiveInput(BroadbandError, ValueError):
    pass

class EmptyPlans(EmptyInput):
    pass

class ZeroMean(BroadbandError, ValueError):
    pass

class OutOfRange(BroadbandError, ValueError):
    pass


# =============================================================================
# Statistics Errors
# =============================================================================
class DegenerateVariance(BroadbandError, ValueError):
    pass

class TooFewNodes(BroadbandError, ValueError):
    pass

class SampleTooSmall(BroadbandError, ValueError):
    pass

class NoCablePresence(BroadbandError, ValueError):
    pass

class MultipleCableISPs(BroadbandError, ValueError):
    pass

class InsufficientModeCoverage(BroadbandError, ValueError):
    pass

class NoIncomeData(BroadbandError, ValueError):
    pass

class SingleGroupOnly(BroadbandError, ValueError):
    pass


# =============================================================================
# Orchestrator Errors
# =============================================================================
class ConfigInvalid(BroadbandError, IOError):
    pass

class OutputUnwritable(BroadbandError, IOError):
    pass

class FleetUnavailable(BroadbandError, IOError):
    pass
