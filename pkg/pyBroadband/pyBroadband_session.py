#!/usr/bin/env python
'''
pyBroadband_session

Holds the Workflow Session Classes: actions, classified pages, session state
and query outcomes, with their JSON lines transcript form.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 04/04/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Transcript Serialization (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import enum
import json
import logging

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_adapter import TemplateKind
from pyBroadband.pyBroadband_address import Address
from pyBroadband.pyBroadband_plan import Plan

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

MISS_REASONS = ('transport', 'budget', 'blocked', 'unknown-template',
    'no-suggestion', 'no-unit', 'no-plans', 'error')


# =============================================================================
# Action Kind Enumeration
# =============================================================================
class ActionKind(str, enum.Enum):

    EXTRACT_PLANS = 'ExtractPlans'
    SELECT_SUGGESTION = 'SelectSuggestion'
    SELECT_UNIT = 'SelectUnit'
    CHOOSE_NEW_CUSTOMER_PATH = 'ChooseNewCustomerPath'
    TERMINATE_UNSERVICEABLE = 'TerminateUnserviceable'
    TERMINATE_MISS = 'TerminateMiss'


TERMINAL_ACTIONS = (ActionKind.EXTRACT_PLANS, ActionKind.TERMINATE_UNSERVICEABLE, ActionKind.TERMINATE_MISS)


# =============================================================================
# Action Class
# =============================================================================
class Action(object):

    '''
    Workflow Action Class

    The payload carries what the transport needs to perform the action
    (suggestion street and zip, unit, option index) or the miss reason.
    '''

    def __init__(self, kind, **payload):

        self.kind = ActionKind(kind)
        self.payload = payload


    def is_terminal(self):

        return self.kind in TERMINAL_ACTIONS


    def to_dict(self):

        return {'kind':self.kind.value, 'payload':dict(self.payload)}


    @classmethod
    def from_dict(cls, data):

        return cls(data['kind'], **data.get('payload',{}))


    def __eq__(self, other):

        if not isinstance(other,Action):
            return NotImplemented
        #end

        return (self.kind == other.kind) and (self.payload == other.payload)


    def __repr__(self):

        if self.payload:
            return 'Action(%s, %r)' %(self.kind.value, self.payload)
        #end

        return 'Action(%s)' %(self.kind.value)



# =============================================================================
# Classified Page Class
# =============================================================================
class ClassifiedPage(object):

    '''
    Fetched page with its template kind and parsed payload

    Payload lists: plans (Plan), suggestions ((street, zip) tuples),
    units (STR), options ((index, label) tuples).
    '''

    def __init__(self, kind, body='', plans=None, suggestions=None, units=None, options=None, partial=False, new_customer=None):

        self.kind = TemplateKind(kind)
        self.body = body
        self.plans = list(plans or [])
        self.suggestions = list(suggestions or [])
        self.units = list(units or [])
        self.options = list(options or [])
        self.partial = partial
        self.new_customer = new_customer


    def __repr__(self):

        return 'ClassifiedPage(%s, plans=%d, suggestions=%d, units=%d, options=%d)' %(self.kind.value,
            len(self.plans), len(self.suggestions), len(self.units), len(self.options))



# =============================================================================
# Session State Class
# =============================================================================
class SessionState(object):

    '''
    Workflow engine position in one BAT query
    '''

    def __init__(self, input_address, max_steps, seed=0, isp_name=''):

        '''
        Session State Class Initialization

        **Arguments:**

        - input_address -> INST: Queried Address
        - max_steps -> INT: Step budget of the adapter

        **Keyword arguments:**

        - seed -> INT: Seed for seeded choices, *Default* = 0
        - isp_name -> STR: ISP queried, *Default* = ''
        '''

        self.input_address = input_address
        self.max_steps = max_steps
        self.seed = seed
        self.isp_name = isp_name
        self.current_template = TemplateKind.UNKNOWN
        self.resolved_address = None
        self.transcript = []
        self.timeouts = 0


    @property
    def step_count(self):

        return len(self.transcript)


    def current_address(self):

        '''
        Address the session is currently querying
        '''

        if self.resolved_address is not None:
            return self.resolved_address
        #end

        return self.input_address


    def record(self, kind, action, elapsed_ms):

        '''
        Append one transcript entry

        **Arguments:**

        - kind -> INST: TemplateKind of the fetched page
        - action -> INST: Action chosen for it
        - elapsed_ms -> FLOAT: Wait applied to the page
        '''

        self.current_template = TemplateKind(kind)
        self.transcript.append((self.current_template, action, float(elapsed_ms)))


    def waits_ms(self):

        return sum([entry[2] for entry in self.transcript])



# =============================================================================
# Outcome Status Enumeration
# =============================================================================
class OutcomeStatus(str, enum.Enum):

    HIT = 'Hit'
    MISS = 'Miss'
    UNSERVICEABLE = 'Unserviceable'



# =============================================================================
# Query Outcome Class
# =============================================================================
class QueryOutcome(object):

    '''
    Result of one BAT query session
    '''

    def __init__(self, status, plans=None, total_ms=0.0, resolved_address=None, reason=None,
        transcript=None, address=None, isp_name='', egress=None):

        '''
        Query Outcome Class Initialization

        **Arguments:**

        - status -> STR: Hit, Miss or Unserviceable

        **Keyword arguments:**

        - plans -> LIST: Extracted plans, *Default* = None
        - total_ms -> FLOAT: Wall time of the session in ms, *Default* = 0.0
        - resolved_address -> INST: Address after recovery, *Default* = None
        - reason -> STR: Miss reason, *Default* = None
        - transcript -> LIST: (TemplateKind, Action, elapsed_ms) entries, *Default* = None
        - address -> INST: Queried address, *Default* = None
        - isp_name -> STR: ISP queried, *Default* = ''
        - egress -> STR: Egress identity used, *Default* = None
        '''

        self.status = OutcomeStatus(status)
        self.plans = list(plans or [])
        self.total_ms = float(total_ms)
        self.resolved_address = resolved_address
        self.reason = reason
        self.transcript = list(transcript or [])
        self.address = address
        self.isp_name = isp_name
        self.egress = egress

        #
        if (self.status == OutcomeStatus.HIT) != (len(self.plans) > 0):
            raise ValueError('Outcome status Hit requires plans and plans require status Hit')
        #end
        if (self.status == OutcomeStatus.MISS) and (self.reason not in MISS_REASONS):
            raise ValueError('Miss reason %r not understood - use one of %s' %(reason,MISS_REASONS))
        #end


    @classmethod
    def miss(cls, reason, **kwargs):

        return cls(OutcomeStatus.MISS, reason=reason, **kwargs)


    def label(self):

        if self.status == OutcomeStatus.MISS:
            return 'Miss(%s)' %(self.reason)
        #end

        return self.status.value


    def to_dict(self):

        '''
        Transcript line form of the outcome
        '''

        data = {}
        if self.address is not None:
            data['address_id'] = self.address.address_id
        #end
        data['isp'] = self.isp_name
        data['status'] = self.status.value
        data['reason'] = self.reason
        data['plans'] = [plan.to_dict() for plan in self.plans]
        data['total_ms'] = self.total_ms
        data['egress'] = self.egress
        if self.resolved_address is not None:
            data['resolved_address'] = self.resolved_address.to_dict()
        else:
            data['resolved_address'] = None
        #end
        data['transcript'] = [{'template':kind.value, 'action':action.to_dict(), 'elapsed_ms':elapsed}
            for (kind, action, elapsed) in self.transcript]

        return data


    @classmethod
    def from_dict(cls, data):

        resolved = data.get('resolved_address')
        if resolved is not None:
            resolved = Address(**resolved)
        #end
        transcript = [(TemplateKind(entry['template']), Action.from_dict(entry['action']), entry['elapsed_ms'])
            for entry in data.get('transcript',[])]

        return cls(data['status'], plans=[Plan.from_dict(item) for item in data.get('plans',[])],
            total_ms=data.get('total_ms',0.0), resolved_address=resolved, reason=data.get('reason'),
            transcript=transcript, isp_name=data.get('isp',''), egress=data.get('egress'))


    def __str__(self):

        '''
        Print Structured Outcome
        '''

        text = '\nQuery Outcome -- %s\n%s\n' %(self.label(),'='*60)
        if self.address is not None:
            text += '    Address: %s, %s %s %s\n' %(self.address.line1(),self.address.city,self.address.state,self.address.zip)
        #end
        if self.resolved_address is not None:
            text += '    Resolved: %s %s\n' %(self.resolved_address.line1(),self.resolved_address.zip)
        #end
        text += '    Total Time: %.1f ms\n' %(self.total_ms)
        text += '\n    Step  Template             Action                       Wait (ms)\n'
        for i, (kind, action, elapsed) in enumerate(self.transcript):
            text += '    %4d  %-20s %-26s %11.1f\n' %(i+1, kind.value, action.kind.value, elapsed)
        #end
        if self.plans:
            text += '\n    Download (Mbps)  Upload (Mbps)  Price ($)  Tech\n'
            for plan in self.plans:
                text += '    %s\n' %(str(plan))
            #end
        #end

        return text


    def write2file(self, outfile):

        '''
        Append the structured outcome to a text file

        **Arguments:**

        - outfile -> STR/FILE: File name or open file handle
        '''

        if isinstance(outfile,str):
            with open(outfile,'a',encoding='utf-8') as fid:
                fid.write(self.__str__())
            #end
        else:
            outfile.write(self.__str__())
        #end



def write_transcripts(outcomes, path, mode='a'):

    '''
    Write query outcomes as JSON lines, one session per line

    **Arguments:**

    - outcomes -> LIST: QueryOutcome instances
    - path -> STR: Transcript file name

    **Keyword arguments:**

    - mode -> STR: File mode, *Default* = 'a'
    '''

    with open(path,mode,encoding='utf-8') as fid:
        for outcome in outcomes:
            fid.write(json.dumps(outcome.to_dict(), sort_keys=True) + '\n')
        #end
    #end


def read_transcripts(path):

    '''
    Read JSON lines transcripts back into QueryOutcome instances
    '''

    outcomes = []
    with open(path,'r',encoding='utf-8') as fid:
        for line in fid:
            if line.strip() == '':
                continue
            #end
            outcomes.append(QueryOutcome.from_dict(json.loads(line)))
        #end
    #end

    return outcomes



#==============================================================================
# Session Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Session...')
    print(QueryOutcome('Hit', plans=[Plan(300, 300, 55, 'fiber')], total_ms=812.0, isp_name='AT&T'))
    print(QueryOutcome.miss('blocked', isp_name='Cox').label())
