#!/usr/bin/env python
'''
pyBroadband_engine

Holds the Workflow Engine routines that drive one BAT query as a state
machine over classified page templates.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.2   $Date: 11/04/2023 21:00$


History
-------
    v. 1.0  - Initial Engine Creation (2023)
    v. 1.1  - Provisional Head Classification (2023)
    v. 1.2  - Sanity Window Filtering of Extracted Plans (2023)
'''

__version__ = '$Revision: $'

'''
To Do:
    - ExistingCustomer pages offering fewer than two options end as unknown-template
'''

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import html
import random
import asyncio
import logging

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import InvalidPlan, StepBudgetExceeded, TimeoutExpired, TransportError, EmptyInput
from pyBroadband.pyBroadband_adapter import TemplateKind, PRIORITY
from pyBroadband.pyBroadband_address import match_suggestion
from pyBroadband.pyBroadband_plan import Plan
from pyBroadband.pyBroadband_session import Action, ActionKind, ClassifiedPage, SessionState, QueryOutcome, OutcomeStatus

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)


#==============================================================================
# classify_template function
#==============================================================================
def classify_template(page_body, adapter):

    '''
    Assign the template kind of a page body

    Patterns are tried in priority order (PlansPage, IncorrectAddress,
    MultiDwellingUnit, ExistingCustomer, Unserviceable, Blocked); the first
    kind with a matching pattern wins, Unknown when none match.

    **Arguments:**

    - page_body -> STR: Page text
    - adapter -> INST: AdapterSpec of the ISP
    '''

    if not page_body:
        return TemplateKind.UNKNOWN
    #end
    for kind in PRIORITY:
        for pattern in adapter.patterns[kind]:
            if pattern.search(page_body) is not None:
                return kind
            #end
        #end
    #end

    return TemplateKind.UNKNOWN


#==============================================================================
# parse_page function
#==============================================================================
def parse_page(body, kind, adapter, window=None):

    '''
    Extract the payload of a classified page

    Plans outside the sanity window are dropped with a warning.

    **Arguments:**

    - body -> STR: Page text
    - kind -> INST: TemplateKind of the page
    - adapter -> INST: AdapterSpec of the ISP

    **Keyword arguments:**

    - window -> DICT: Plan sanity window, *Default* = None (SANITY_WINDOW)
    '''

    page = ClassifiedPage(kind, body)
    extractors = adapter.extractors
    if kind == TemplateKind.PLANS_PAGE:
        for match in extractors['plans'].finditer(body):
            try:
                plan = Plan(match.group('download'), match.group('upload'), match.group('price'),
                    match.group('technology'), window=window)
            except InvalidPlan as error:
                logger.warning('%s: dropped plan row: %s', adapter.isp_name, error)
                continue
            #end
            if plan not in page.plans:
                page.plans.append(plan)
            #end
        #end
    elif kind == TemplateKind.INCORRECT_ADDRESS:
        for match in extractors['suggestions'].finditer(body):
            page.suggestions.append((html.unescape(match.group('street')).strip(), match.group('zip')))
        #end
    elif kind == TemplateKind.MULTI_DWELLING_UNIT:
        for match in extractors['units'].finditer(body):
            page.units.append(html.unescape(match.group('unit')).strip())
        #end
    elif kind == TemplateKind.EXISTING_CUSTOMER:
        for match in extractors['options'].finditer(body):
            label = html.unescape(match.group('label')).strip()
            page.options.append((int(match.group('index')), label))
            if (page.new_customer is None) and (extractors['new_customer'].search(label) is not None):
                page.new_customer = int(match.group('index'))
            #end
        #end
    #end

    return page


#==============================================================================
# next_action function
#==============================================================================
def next_action(state, page):

    '''
    Choose the action for a classified page

    Pure in (state, page): the unit pick is seeded from the session seed,
    ISP, address and step, so replaying a transcript reproduces its actions.

    **Arguments:**

    - state -> INST: SessionState before recording the page
    - page -> INST: ClassifiedPage
    '''

    #
    if state.step_count >= state.max_steps:
        raise StepBudgetExceeded('Session for %s used all %d steps' %(state.input_address.address_id,state.max_steps),
            isp=state.isp_name)
    #end

    #
    kind = page.kind
    if kind == TemplateKind.PLANS_PAGE:
        return Action(ActionKind.EXTRACT_PLANS)

    elif kind == TemplateKind.INCORRECT_ADDRESS:
        streets = [item[0] for item in page.suggestions]
        zips = [item[1] for item in page.suggestions]
        index = match_suggestion(state.current_address(), streets, zips)
        if index is None:
            return Action(ActionKind.TERMINATE_MISS, reason='no-suggestion')
        #end
        return Action(ActionKind.SELECT_SUGGESTION, index=index, street=streets[index], zip=zips[index])

    elif kind == TemplateKind.MULTI_DWELLING_UNIT:
        if len(page.units) == 0:
            return Action(ActionKind.TERMINATE_MISS, reason='no-unit')
        #end
        rng = random.Random('%s|%s|%s|%d' %(state.seed, state.isp_name, state.input_address.address_id, state.step_count))
        return Action(ActionKind.SELECT_UNIT, unit=rng.choice(page.units))

    elif kind == TemplateKind.EXISTING_CUSTOMER:
        option = page.new_customer
        if (option is None) and (len(page.options) >= 2):
            option = page.options[1][0]
        #end
        if option is None:
            return Action(ActionKind.TERMINATE_MISS, reason='unknown-template')
        #end
        return Action(ActionKind.CHOOSE_NEW_CUSTOMER_PATH, option=option)

    elif kind == TemplateKind.UNSERVICEABLE:
        return Action(ActionKind.TERMINATE_UNSERVICEABLE)

    elif kind == TemplateKind.BLOCKED:
        return Action(ActionKind.TERMINATE_MISS, reason='blocked')
    #end

    return Action(ActionKind.TERMINATE_MISS, reason='unknown-template')


#==============================================================================
# wait_for_ready function
#==============================================================================
async def wait_for_ready(page, kind, timing_table):

    '''
    Wait for a page to complete within the budget of its template

    Returns the elapsed wait in ms. Raises TimeoutExpired (carrying
    elapsed_ms) when the budget runs out on an incomplete page; the page
    keeps whatever arrived so far.

    **Arguments:**

    - page -> INST: PendingPage
    - kind -> INST: TemplateKind choosing the budget
    - timing_table -> DICT: TemplateKind -> maximum wait in ms
    '''

    #
    budget = timing_table[kind]
    loop = asyncio.get_running_loop()
    start = loop.time()
    try:
        await asyncio.wait_for(page.completed.wait(), budget/1000.0)
    except asyncio.TimeoutError:
        error = TimeoutExpired('Page %s did not complete within %.0f ms' %(kind.value,budget))
        error.elapsed_ms = max((loop.time() - start)*1000.0, budget)
        raise error
    #end

    return (loop.time() - start)*1000.0


#==============================================================================
# run_session function
#==============================================================================
async def run_session(address, adapter, transport, seed=0, egress=None, window=None):

    '''
    Drive one BAT query: submit, wait, classify, act until a terminal action

    **Arguments:**

    - address -> INST: Address to query
    - adapter -> INST: AdapterSpec of the ISP
    - transport -> INST: Transport instance

    **Keyword arguments:**

    - seed -> INT: Session seed, *Default* = 0
    - egress -> STR: Egress identity, *Default* = None
    - window -> DICT: Plan sanity window, *Default* = None
    '''

    #
    loop = asyncio.get_running_loop()
    start = loop.time()
    isp = adapter.isp_name
    state = SessionState(address, adapter.max_steps, seed, isp)
    throttled = [0.0]

    # total_ms excludes rate limit waits
    def finish(status, plans=None, reason=None):
        total_ms = max((loop.time() - start)*1000.0 - throttled[0], state.waits_ms())
        return QueryOutcome(status, plans=plans, total_ms=total_ms, resolved_address=state.resolved_address,
            reason=reason, transcript=state.transcript, address=address, isp_name=isp, egress=egress)

    session_id = None
    try:
        pending = await transport.submit(isp, address, egress)
        session_id = pending.session_id
        while True:
            throttled[0] += pending.throttle_ms

            # Provisional kind from the head picks the wait budget
            provisional = classify_template(pending.head, adapter)
            try:
                elapsed = await wait_for_ready(pending, provisional, adapter.timing_table)
            except TimeoutExpired as error:
                elapsed = error.elapsed_ms
                state.timeouts += 1
                logger.info('%s: %s, classifying partial page', isp, error)
            #end

            if pending.error is not None:
                raise pending.error
            #end

            #
            body = pending.text()
            kind = classify_template(body, adapter)
            page = parse_page(body, kind, adapter, window)
            page.partial = not pending.is_complete()
            action = next_action(state, page)
            state.record(kind, action, elapsed)
            logger.debug('%s %s step %d: %s -> %r', isp, address.address_id, state.step_count, kind.value, action)

            #
            if action.kind == ActionKind.EXTRACT_PLANS:
                if len(page.plans) == 0:
                    return finish(OutcomeStatus.MISS, reason='no-plans')
                #end
                return finish(OutcomeStatus.HIT, plans=page.plans)
            elif action.kind == ActionKind.TERMINATE_UNSERVICEABLE:
                return finish(OutcomeStatus.UNSERVICEABLE)
            elif action.kind == ActionKind.TERMINATE_MISS:
                return finish(OutcomeStatus.MISS, reason=action.payload['reason'])
            elif action.kind == ActionKind.SELECT_SUGGESTION:
                state.resolved_address = state.current_address().replace(street=action.payload['street'],
                    zip=action.payload['zip'])
            elif action.kind == ActionKind.SELECT_UNIT:
                state.resolved_address = state.current_address().replace(unit=action.payload['unit'])
            #end

            #
            if state.step_count >= adapter.max_steps:
                raise StepBudgetExceeded('Session for %s used all %d steps' %(address.address_id,adapter.max_steps), isp=isp)
            #end
            pending = await transport.act(isp, pending.session_id, action, egress)
            session_id = pending.session_id
        #end

    except TransportError as error:
        logger.warning('%s %s: %s', isp, address.address_id, error)
        return finish(OutcomeStatus.MISS, reason='transport')
    except StepBudgetExceeded as error:
        logger.info('%s', error)
        return finish(OutcomeStatus.MISS, reason='budget')
    finally:
        await transport.end(isp, session_id)
    #end


#==============================================================================
# hit_rate function
#==============================================================================
def hit_rate(outcomes):

    '''
    Fraction of outcomes with status Hit
    '''

    if len(outcomes) == 0:
        raise EmptyInput('hit_rate needs at least one outcome')
    #end

    return sum([1 for outcome in outcomes if outcome.status == OutcomeStatus.HIT]) / float(len(outcomes))


#==============================================================================
# serviceability_rate function
#==============================================================================
def serviceability_rate(outcomes):

    '''
    Fraction of outcomes the BAT answered (Hit or Unserviceable)
    '''

    if len(outcomes) == 0:
        raise EmptyInput('serviceability_rate needs at least one outcome')
    #end
    answered = (OutcomeStatus.HIT, OutcomeStatus.UNSERVICEABLE)

    return sum([1 for outcome in outcomes if outcome.status in answered]) / float(len(outcomes))
