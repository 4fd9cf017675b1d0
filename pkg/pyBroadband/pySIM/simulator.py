#!/usr/bin/env python
'''
simulator - BAT workflow simulator core.

Holds the Simulator Scenario Class, ground truth synthesis and the Simulator
Endpoint Class that answers address submissions and page actions with
template pages, drawing every session's interstitial path from the seed.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.2   $Date: 23/05/2023 21:00$


History
-------
	v. 1.0  - Initial Class Creation (2023)
	v. 1.1  - Unrecoverable Suggestion Lists (2023)
	v. 1.2  - Outcome Prediction (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import html
import random
import logging

# =============================================================================
# External Python modules
# =============================================================================
import yaml

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import InvalidScenario, InvalidPlan, UnknownSession, UnknownAddress, FileMissing
from pyBroadband.pyBroadband_adapter import TemplateKind, marker
from pyBroadband.pyBroadband_address import Address, normalize
from pyBroadband.pyBroadband_plan import Plan
from pyBroadband.pyBroadband_session import ActionKind, OutcomeStatus

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

UNSERVICEABLE = 'Unserviceable'
NOISE_KEYS = ('p_incorrect_address', 'p_mdu', 'p_existing_customer', 'p_blocked')
DEFAULT_SERVICE_MS = 5.0
EXISTING_OPTIONS = ('Sign in to your account', 'View plans as a new customer', 'Change my current plan')
NEW_CUSTOMER_OPTION = 1
COMPLETE = '<!--bat:complete-->'


def _street_text(street):

	return ' '.join(str(street).upper().split())


def canonical_key(street, zip):

	'''
	Truth map key: canonical street tokens and zip (unit ignored)
	'''

	return '%s|%s' %(normalize(street).text(), str(zip).strip())


# =============================================================================
# Simulator Scenario Class
# =============================================================================
class SimScenario(object):

	'''
	Simulated ISP availability tool
	'''

	def __init__(self, isp_name, profiles, noise=None, latency=None, p_unrecoverable=0.0,
		p_unserviceable=0.0, p_deviate=0.1, capacity=None, test_mode=False, truth=None):

		'''
		Simulator Scenario Class Initialization

		**Arguments:**

		- isp_name -> STR: ISP name
		- profiles -> DICT: Profile name -> {'weight': FLOAT, 'plans': LIST of [down, up, price, tech]}

		**Keyword arguments:**

		- noise -> DICT: p_incorrect_address, p_mdu, p_existing_customer, p_blocked, *Default* = all 0
		- latency -> DICT: TemplateKind -> ms, {'fixed': ms} or {'uniform': [lo, hi]}, *Default* = 5 ms
		- p_unrecoverable -> FLOAT: IncorrectAddress sessions missing the canonical suggestion, *Default* = 0.0
		- p_unserviceable -> FLOAT: Addresses without service in synthesized truth, *Default* = 0.0
		- p_deviate -> FLOAT: Addresses drawing a profile other than their block group's, *Default* = 0.1
		- capacity -> INT: Concurrent requests served per endpoint, *Default* = None (unbounded)
		- test_mode -> BOOL: Serve GET /truth, *Default* = False
		- truth -> DICT: canonical key -> list of Plan or UNSERVICEABLE, *Default* = None
		'''

		#
		self.isp_name = str(isp_name)
		if self.isp_name == '':
			raise InvalidScenario('Scenario needs an isp_name')
		#end

		# Noise Profile
		self.noise = dict((key, 0.0) for key in NOISE_KEYS)
		for key in list((noise or {}).keys()):
			if key not in NOISE_KEYS:
				raise InvalidScenario('%s noise key %r not understood - use %s' %(self.isp_name,key,NOISE_KEYS))
			#end
			self.noise[key] = float(noise[key])
		#end
		for key in NOISE_KEYS:
			if not (0.0 <= self.noise[key] <= 1.0):
				raise InvalidScenario('%s %s must lie in [0, 1]' %(self.isp_name,key))
			#end
		#end
		if sum(self.noise.values()) > 1.0 + 1e-12:
			raise InvalidScenario('%s noise probabilities sum above 1' %(self.isp_name))
		#end
		for name, value in (('p_unrecoverable',p_unrecoverable),('p_unserviceable',p_unserviceable),('p_deviate',p_deviate)):
			if not (0.0 <= value <= 1.0):
				raise InvalidScenario('%s %s must lie in [0, 1]' %(self.isp_name,name))
			#end
		#end
		self.p_unrecoverable = float(p_unrecoverable)
		self.p_unserviceable = float(p_unserviceable)
		self.p_deviate = float(p_deviate)

		# Plan Profiles
		if not profiles:
			raise InvalidScenario('%s scenario needs at least one plan profile' %(self.isp_name))
		#end
		self.profiles = {}
		self.weights = {}
		for name in sorted(profiles.keys()):
			entry = profiles[name]
			try:
				self.profiles[name] = [Plan(*row) for row in entry['plans']]
			except (InvalidPlan, TypeError, KeyError) as error:
				raise InvalidScenario('%s profile %s holds an invalid plan: %s' %(self.isp_name,name,error))
			#end
			if len(self.profiles[name]) == 0:
				raise InvalidScenario('%s profile %s has no plans' %(self.isp_name,name))
			#end
			self.weights[name] = float(entry.get('weight',1.0))
			if self.weights[name] <= 0:
				raise InvalidScenario('%s profile %s weight must be positive' %(self.isp_name,name))
			#end
		#end

		# Latency
		self.latency = {}
		for kind in TemplateKind:
			self.latency[kind] = ('fixed', DEFAULT_SERVICE_MS)
		#end
		for key in list((latency or {}).keys()):
			try:
				kind = TemplateKind(key)
			except ValueError:
				raise InvalidScenario('%s latency kind %r not understood' %(self.isp_name,key))
			#end
			self.latency[kind] = self._latency_spec(latency[key])
		#end

		#
		if (capacity is not None) and (int(capacity) < 1):
			raise InvalidScenario('%s capacity must be >= 1' %(self.isp_name))
		#end
		self.capacity = capacity
		self.test_mode = bool(test_mode)
		self.truth = {}
		self.addresses = {}
		if truth is not None:
			self.set_truth(truth)
		#end


	def _latency_spec(self, value):

		if isinstance(value,(int,float)):
			spec = ('fixed', float(value))
		elif isinstance(value,dict) and ('fixed' in value):
			spec = ('fixed', float(value['fixed']))
		elif isinstance(value,dict) and ('uniform' in value):
			lo, hi = value['uniform']
			spec = ('uniform', float(lo), float(hi))
			if hi < lo:
				raise InvalidScenario('%s uniform latency needs lo <= hi' %(self.isp_name))
			#end
		else:
			raise InvalidScenario('%s latency %r not understood - use ms, fixed or uniform' %(self.isp_name,value))
		#end
		if spec[1] < 0:
			raise InvalidScenario('%s latency must be nonnegative' %(self.isp_name))
		#end

		return spec


	def service_ms(self, kind, rng):

		'''
		Draw the service time of a page template
		'''

		spec = self.latency[kind]
		if spec[0] == 'fixed':
			return spec[1]
		#end

		return rng.uniform(spec[1], spec[2])


	def set_truth(self, truth, addresses=None):

		'''
		Install a truth map keyed by canonical key

		**Arguments:**

		- truth -> DICT: canonical key -> list of Plan or UNSERVICEABLE

		**Keyword arguments:**

		- addresses -> DICT: canonical key -> Address, *Default* = None
		'''

		for key in list(truth.keys()):
			value = truth[key]
			if (value != UNSERVICEABLE) and ((not isinstance(value,list)) or (len(value) == 0)):
				raise InvalidScenario('%s truth for %s must be plans or %s' %(self.isp_name,key,UNSERVICEABLE))
			#end
		#end
		self.truth = dict(truth)
		self.addresses = dict(addresses or {})


	def with_truth(self, addresses, seed, assignment=None):

		'''
		Synthesize and install truth for an address list, return self
		'''

		truth, keyed = synthesize_truth(addresses, self, seed, assignment=assignment)
		self.set_truth(truth, keyed)

		return self


	@classmethod
	def load(cls, path):

		'''
		Load a Simulator Scenario from a YAML document
		'''

		if not os.path.isfile(path):
			raise FileMissing('Error: scenario file %s does not exist' %(path))
		#end
		with open(path,'r',encoding='utf-8') as fid:
			try:
				doc = yaml.safe_load(fid)
			except yaml.YAMLError as error:
				raise InvalidScenario('Scenario file %s is not valid YAML: %s' %(path,error))
			#end
		#end
		if (not isinstance(doc,dict)) or ('isp_name' not in doc) or ('profiles' not in doc):
			raise InvalidScenario('Scenario file %s needs isp_name and profiles' %(path))
		#end
		keys = ('noise','latency','p_unrecoverable','p_unserviceable','p_deviate','capacity','test_mode')
		kwargs = dict((key, doc[key]) for key in keys if key in doc)

		return cls(doc['isp_name'], doc['profiles'], **kwargs)


	def __str__(self):

		text = '\nScenario -- %s\n%s\n' %(self.isp_name,'='*60)
		for key in NOISE_KEYS:
			text += '    %-22s %6.3f\n' %(key, self.noise[key])
		#end
		text += '    %-22s %6.3f\n' %('p_unrecoverable', self.p_unrecoverable)
		for name in sorted(self.profiles.keys()):
			text += '    profile %-12s weight %5.2f  %d plans\n' %(name, self.weights[name], len(self.profiles[name]))
		#end
		text += '    truth entries: %d\n' %(len(self.truth))

		return text



def _weighted(rng, names, weights):

	total = sum([weights[name] for name in names])
	u = rng.random()*total
	acc = 0.0
	for name in names:
		acc += weights[name]
		if u < acc:
			return name
		#end
	#end

	return names[-1]


#==============================================================================
# synthesize_truth function
#==============================================================================
def synthesize_truth(addresses, scenario, seed, p_unserviceable=None, assignment=None):

	'''
	Ground truth plans clustered by block group

	Every block group draws one profile; each address keeps it except with
	probability p_deviate, where it draws again. Addresses lose service with
	probability p_unserviceable.

	**Arguments:**

	- addresses -> LIST: Address instances
	- scenario -> INST: SimScenario
	- seed -> INT: Seed

	**Keyword arguments:**

	- p_unserviceable -> FLOAT: Overrides the scenario value, *Default* = None
	- assignment -> DICT: GEOID -> profile name fixing block group profiles, *Default* = None (drawn)

	Returns (truth, addresses) maps keyed by canonical key.
	'''

	#
	if p_unserviceable is None:
		p_unserviceable = scenario.p_unserviceable
	#end
	names = sorted(scenario.profiles.keys())
	groups = {}
	truth = {}
	keyed = {}
	for address in addresses:
		geoid = address.block_group_id
		if (geoid not in groups) and (assignment is not None) and (geoid in assignment):
			if assignment[geoid] not in scenario.profiles:
				raise InvalidScenario('%s has no profile %s' %(scenario.isp_name,assignment[geoid]))
			#end
			groups[geoid] = assignment[geoid]
		elif geoid not in groups:
			groups[geoid] = _weighted(random.Random('%s|%s|bg|%s' %(seed,scenario.isp_name,geoid)), names, scenario.weights)
		#end
		key = canonical_key(address.street, address.zip)
		rng = random.Random('%s|%s|truth|%s' %(seed,scenario.isp_name,key))
		profile = groups[geoid]
		if rng.random() < scenario.p_deviate:
			profile = _weighted(rng, names, scenario.weights)
		#end
		if rng.random() < p_unserviceable:
			truth[key] = UNSERVICEABLE
		else:
			truth[key] = list(scenario.profiles[profile])
		#end
		keyed[key] = address
	#end

	return truth, keyed


# =============================================================================
# Simulator Page Class
# =============================================================================
class SimPage(object):

	'''
	Rendered page: head, body and sampled service time
	'''

	def __init__(self, session_id, kind, head, body, service_ms):

		self.session_id = session_id
		self.kind = kind
		self.head = head
		self.body = body
		self.service_ms = service_ms


	def text(self):

		return self.head + self.body



# =============================================================================
# Simulator Session Class
# =============================================================================
class SimSession(object):

	def __init__(self, session_id, queried_address, key, phases, rng, recoverable):

		self.session_id = session_id
		self.queried_address = queried_address
		self.key = key
		self.phases = phases
		self.phase = 0
		self.rng = rng
		self.recoverable = recoverable
		self.units = None
		self.suggestions = None



# =============================================================================
# Simulator Endpoint Class
# =============================================================================
class SimEndpoint(object):

	'''
	One simulated ISP availability tool answering submissions and actions
	'''

	def __init__(self, scenario, seed=0):

		self.scenario = scenario
		self.seed = seed
		self.isp_name = scenario.isp_name
		self.sessions = {}
		self._count = 0


	def _route(self, street, unit, zip):

		'''
		Session path for a submission: (key, phases, recoverable, rng)

		The first draws of the session generator fix the path; later draws
		feed unit lists, suggestion order and service times.
		'''

		try:
			key = canonical_key(street, zip)
		except ValueError:
			key = '|%s' %(str(zip).strip())
		#end
		rng = random.Random('%s|%s|session|%s' %(self.seed,self.isp_name,key))
		u = rng.random()
		recoverable = rng.random() >= self.scenario.p_unrecoverable
		noise = self.scenario.noise

		#
		if key not in self.scenario.truth:
			return key, ['incorrect'], False, rng
		#end
		phases = []
		bounds = [noise[name] for name in NOISE_KEYS]
		names = ['incorrect','mdu','existing','blocked']
		drawn = None
		acc = 0.0
		for i in range(len(names)):
			acc += bounds[i]
			if u < acc:
				drawn = names[i]
				break
			#end
		#end
		if drawn == 'blocked':
			return key, ['blocked'], recoverable, rng
		#end
		if (drawn == 'incorrect') or (_street_text(street) != normalize(street).text()):
			phases.append('incorrect')
		#end
		if (drawn == 'mdu') and ((unit is None) or (str(unit).strip() == '')):
			phases.append('mdu')
		#end
		if drawn == 'existing':
			phases.append('existing')
		#end
		if self.scenario.truth[key] == UNSERVICEABLE:
			phases.append('unserviceable')
		else:
			phases.append('plans')
		#end

		return key, phases, recoverable, rng


	def open(self, request):

		'''
		Start a session from an address submission

		**Arguments:**

		- request -> DICT: street, unit, city, state, zip
		'''

		self._count += 1
		session_id = '%s-%06d' %(self.isp_name.lower().replace(' ','-'), self._count)
		key, phases, recoverable, rng = self._route(request['street'], request.get('unit'), request['zip'])
		session = SimSession(session_id, request, key, phases, rng, recoverable)
		self.sessions[session_id] = session

		return self._render(session)


	def respond(self, session_id, action):

		'''
		Advance a session by one action

		Correct recovery actions advance to the next phase; anything else
		re-emits the current template.

		**Arguments:**

		- session_id -> STR: Session identifier
		- action -> DICT: {'kind': ActionKind value, 'payload': DICT}
		'''

		#
		if session_id not in self.sessions:
			raise UnknownSession('%s has no session %s' %(self.isp_name,session_id), isp=self.isp_name)
		#end
		session = self.sessions[session_id]

		#
		kind = action.get('kind')
		payload = action.get('payload') or {}
		phase = session.phases[session.phase]
		advance = False
		if (phase == 'incorrect') and (kind == ActionKind.SELECT_SUGGESTION.value):
			truth_zip = session.key.split('|')[1]
			try:
				chosen = normalize(payload.get('street','')).text()
			except ValueError:
				chosen = None
			#end
			advance = session.recoverable and (chosen == session.key.split('|')[0]) and (payload.get('zip') == truth_zip)
		elif (phase == 'mdu') and (kind == ActionKind.SELECT_UNIT.value):
			advance = payload.get('unit') in (session.units or [])
		elif (phase == 'existing') and (kind == ActionKind.CHOOSE_NEW_CUSTOMER_PATH.value):
			advance = payload.get('option') == NEW_CUSTOMER_OPTION
		#end
		if advance:
			session.phase += 1
		#end

		return self._render(session)


	def _render(self, session):

		#
		phase = session.phases[session.phase]
		rng = session.rng
		isp = self.isp_name
		items = ''
		terminal = phase in ('blocked', 'unserviceable', 'plans')
		if phase == 'incorrect':
			kind = TemplateKind.INCORRECT_ADDRESS
			if session.suggestions is None:
				session.suggestions = self._suggestions(session)
			#end
			items = ''.join(['<li class="suggestion" data-zip="%s">%s</li>' %(zip, html.escape(street))
				for street, zip in session.suggestions])
			items = '<p>We could not find that address. Did you mean:</p><ul>%s</ul>' %(items)
		elif phase == 'mdu':
			kind = TemplateKind.MULTI_DWELLING_UNIT
			if session.units is None:
				count = rng.randint(2,6)
				session.units = [str(100 + i) for i in rng.sample(range(1,40), count)]
			#end
			items = '<p>This address has several units.</p><ul>%s</ul>' %(''.join(['<li class="unit">%s</li>' %(unit)
				for unit in session.units]))
		elif phase == 'existing':
			kind = TemplateKind.EXISTING_CUSTOMER
			items = '<p>Service is active at this address.</p>' + ''.join(['<button class="option" data-option="%d">%s</button>'
				%(i, label) for i, label in enumerate(EXISTING_OPTIONS)])
		elif phase == 'blocked':
			kind = TemplateKind.BLOCKED
			items = '<p>Access denied.</p>'
		elif phase == 'unserviceable':
			kind = TemplateKind.UNSERVICEABLE
			items = '<p>Service is not available at this address.</p>'
		else:
			kind = TemplateKind.PLANS_PAGE
			items = ''.join(['<div class="plan" data-download="%g" data-upload="%g" data-price="%.2f" data-tech="%s"></div>'
				%(plan.download_mbps, plan.upload_mbps, plan.monthly_price_usd, plan.technology.value)
				for plan in self.scenario.truth[session.key]])
		#end

		#
		head = '<html><head><title>%s</title><meta %s></head>' %(html.escape(isp), marker(isp, kind))
		body = '<body>%s%s</body></html>' %(items, COMPLETE)
		if terminal:
			# finished sessions leave the table
			self.close(session.session_id)
		#end

		return SimPage(session.session_id, kind, head, body, self.scenario.service_ms(kind, rng))


	def _suggestions(self, session):

		'''
		Canonical street plus two decoys with other zips, shuffled
		'''

		street, zip = session.key.split('|')
		tokens = street.split(' ')
		entries = []
		if session.recoverable and (session.key in self.scenario.truth):
			entries.append((street, zip))
		#end
		for shift in (1, 2):
			decoy = list(tokens)
			if decoy[0].isdigit():
				decoy[0] = str(int(decoy[0]) + 2*shift)
			else:
				decoy.insert(0, str(2*shift))
			#end
			entries.append((' '.join(decoy), '%05d' %((int(zip) + shift) % 100000)))
		#end
		session.rng.shuffle(entries)

		return entries


	def ground_truth(self, address):

		'''
		Authoritative plans (or UNSERVICEABLE) of an address
		'''

		key = canonical_key(address.street, address.zip)
		if key not in self.scenario.truth:
			raise UnknownAddress('%s has no truth for %s' %(self.isp_name,key), isp=self.isp_name)
		#end

		return self.scenario.truth[key]


	def predict_outcome(self, address):

		'''
		(OutcomeStatus, miss reason) an ideal client obtains for an address
		'''

		key, phases, recoverable, rng = self._route(address.street, address.unit, address.zip)
		if phases == ['blocked']:
			return OutcomeStatus.MISS, 'blocked'
		#end
		if ('incorrect' in phases) and ((not recoverable) or (key not in self.scenario.truth)):
			return OutcomeStatus.MISS, 'no-suggestion'
		#end
		if phases[-1] == 'unserviceable':
			return OutcomeStatus.UNSERVICEABLE, None
		#end

		return OutcomeStatus.HIT, None


	def close(self, session_id):

		'''
		Forget a session; unknown ids are ignored
		'''

		self.sessions.pop(session_id, None)



#==============================================================================
# Simulator Test
#==============================================================================
if __name__ == '__main__':

	print('Testing Simulator...')
	scenario = SimScenario('Demo', {'base':{'weight':1.0, 'plans':[[100, 10, 50, 'cable']]}}, noise={'p_blocked':0.2})
	print(scenario)
