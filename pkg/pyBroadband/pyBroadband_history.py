#!/usr/bin/env python
'''
pyBroadband_history

Holds the Dataset Record Class and the Dataset History Class, the append-only
JSON lines sink crawls write to and resume from.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 25/04/2023 21:00$


History
-------
	v. 1.0  - Initial Class Creation (2023)
	v. 1.1  - Append (hot start) Mode with Torn Line Repair (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import json
import time
import threading
import logging

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import OutputUnwritable, FileMissing
from pyBroadband.pyBroadband_plan import Plan
from pyBroadband.pyBroadband_session import OutcomeStatus
from pyBroadband.pyBroadband_metrics import best_cv as plans_best_cv

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)

TIMING_FIELDS = ('total_ms', 'timestamp')
ADDRESS_FIELDS = ('street', 'unit', 'state', 'zip')
RETRY_REASONS = ('transport', 'error')



# =============================================================================
# Dataset Record Class
# =============================================================================
class DatasetRecord(object):

	'''
	One queried (address, ISP) result
	'''

	def __init__(self, address_id, geoid, city, isp, status, plans=None, best_cv=None, total_ms=0.0,
		timestamp=None, reason=None, street=None, unit=None, state=None, zip=None, egress=None):

		'''
		Dataset Record Class Initialization

		**Arguments:**

		- address_id -> STR: Address identifier (hashed id once released)
		- geoid -> STR: Block group GEOID
		- city -> STR: City name
		- isp -> STR: ISP name
		- status -> STR: Hit, Miss or Unserviceable

		**Keyword arguments:**

		- plans -> LIST: Plan instances, *Default* = None
		- best_cv -> FLOAT: Best carriage value, derived from plans when None, *Default* = None
		- total_ms -> FLOAT: Session wall time, *Default* = 0.0
		- timestamp -> FLOAT: UTC seconds, *Default* = now
		- reason -> STR: Miss reason, *Default* = None
		- street, unit, state, zip -> STR: Address fields dropped at release, *Default* = None
		- egress -> STR: Egress identity, *Default* = None
		'''

		self.address_id = address_id
		self.geoid = geoid
		self.city = city
		self.isp = isp
		self.status = OutcomeStatus(status)
		self.plans = list(plans or [])
		self.total_ms = float(total_ms)
		if timestamp is None:
			timestamp = time.time()
		#end
		self.timestamp = float(timestamp)
		self.reason = reason
		self.street = street
		self.unit = unit
		self.state = state
		self.zip = zip
		self.egress = egress

		#
		if self.status == OutcomeStatus.HIT:
			derived = plans_best_cv(self.plans)
			if (best_cv is not None) and (abs(best_cv - derived) > 1e-9*max(1.0,derived)):
				raise ValueError('Record %s best_cv %r does not match its plans (%r)' %(address_id,best_cv,derived))
			#end
			self.best_cv = derived
		else:
			if best_cv is not None:
				raise ValueError('Record %s has best_cv without status Hit' %(address_id))
			#end
			self.best_cv = None
		#end


	@classmethod
	def from_outcome(cls, outcome, address, timestamp=None):

		'''
		Dataset record of a QueryOutcome

		**Arguments:**

		- outcome -> INST: QueryOutcome
		- address -> INST: Queried Address
		'''

		return cls(address.address_id, address.block_group_id, address.city, outcome.isp_name,
			outcome.status, plans=outcome.plans, total_ms=outcome.total_ms, timestamp=timestamp,
			reason=outcome.reason, street=address.street, unit=address.unit, state=address.state,
			zip=address.zip, egress=outcome.egress)


	def pair(self):

		return (self.address_id, self.isp)


	def to_dict(self):

		return {'address_id':self.address_id, 'geoid':self.geoid, 'city':self.city, 'isp':self.isp,
			'status':self.status.value, 'reason':self.reason,
			'plans':[plan.to_dict() for plan in self.plans], 'best_cv':self.best_cv,
			'total_ms':self.total_ms, 'timestamp':self.timestamp, 'street':self.street,
			'unit':self.unit, 'state':self.state, 'zip':self.zip, 'egress':self.egress}


	@classmethod
	def from_dict(cls, data):

		fields = dict(data)
		fields['plans'] = [Plan.from_dict(item) for item in data.get('plans',[])]

		return cls(**fields)


	def content_key(self):

		'''
		Record content without the timing fields and the egress identity
		'''

		data = self.to_dict()
		for key in TIMING_FIELDS + ('egress',):
			data.pop(key)
		#end

		return json.dumps(data, sort_keys=True)


	def __repr__(self):

		return 'DatasetRecord(%s, %s, %s, %s)' %(self.address_id, self.isp, self.geoid, self.status.value)



# =============================================================================
# Dataset History Class
# =============================================================================
class Dataset(object):

	'''
	JSON lines dataset file with write, append (hot start) and read modes
	'''

	def __init__(self, filename, mode='r', *args, **kwargs):

		'''
		Dataset History Class Initialization

		**Arguments:**

		- filename -> STR: Dataset file name

		**Keyword arguments:**

		- mode -> STR: Write ('w'), append ('a') or read ('r'), *Default* = 'r'

		Append mode drops a torn last line left by a killed run before
		writing, so resumed crawls never see a half record.
		'''

		#
		if mode not in ('w','a','r'):
			raise ValueError('Dataset mode not understood - use w, a or r')
		#end
		self.filename = filename
		self.mode = mode
		self._lock = threading.Lock()
		self.s_count = 0

		#
		if self.mode == 'r':
			if not os.path.isfile(filename):
				raise FileMissing('Error: dataset %s does not exist' %(filename))
			#end
			self.fid = open(filename,'r',encoding='utf-8')
		else:
			directory = os.path.dirname(os.path.abspath(filename))
			try:
				if not os.path.isdir(directory):
					os.makedirs(directory)
				#end
				if self.mode == 'a':
					self._repair()
				#end
				self.fid = open(filename,self.mode,encoding='utf-8')
			except OSError as error:
				raise OutputUnwritable('Error: dataset %s cannot be written: %s' %(filename,error))
			#end
		#end


	def _repair(self):

		'''
		Truncate the file after its last complete line
		'''

		if not os.path.isfile(self.filename):
			return
		#end
		with open(self.filename,'rb+') as fid:
			data = fid.read()
			if (len(data) == 0) or data.endswith(b'\n'):
				return
			#end
			cut = data.rfind(b'\n') + 1
			fid.seek(cut)
			fid.truncate()
		#end
		logger.warning('dropped torn last line (%d bytes) of %s', len(data) - cut, self.filename)


	def write(self, record):

		'''
		Append one record and flush

		**Arguments:**

		- record -> INST: DatasetRecord
		'''

		if self.mode == 'r':
			raise IOError('Dataset %s opened read only' %(self.filename))
		#end
		line = json.dumps(record.to_dict(), sort_keys=True) + '\n'
		with self._lock:
			self.fid.write(line)
			self.fid.flush()
			self.s_count += 1
		#end


	def read(self):

		'''
		Read every complete record of the dataset
		'''

		records = []
		with open(self.filename,'r',encoding='utf-8') as fid:
			lines = fid.readlines()
		#end
		for i, line in enumerate(lines):
			if line.strip() == '':
				continue
			#end
			try:
				records.append(DatasetRecord.from_dict(json.loads(line)))
			except ValueError:
				if (i == len(lines)-1) and not line.endswith('\n'):
					logger.warning('skipped torn last line of %s', self.filename)
					break
				#end
				raise
			#end
		#end

		return records


	def completed_pairs(self, retry=RETRY_REASONS):

		'''
		Set of (address_id, isp) pairs already recorded

		A pair whose latest record is a Miss for one of the retry reasons
		is left out, so a resumed crawl queries it again.

		**Keyword arguments:**

		- retry -> TUPLE: Miss reasons worth another attempt, *Default* = ('transport', 'error')
		'''

		if not os.path.isfile(self.filename):
			return set()
		#end

		completed = set()
		for record in latest_records(self.read()):
			if (record.status == OutcomeStatus.MISS) and (record.reason in retry):
				continue
			#end
			completed.add(record.pair())
		#end

		return completed



	def close(self):

		'''
		Close Dataset File
		'''

		self.fid.close()


	def __enter__(self):

		return self


	def __exit__(self, *args):

		self.close()


#==============================================================================
# latest_records function
#==============================================================================
def latest_records(records):

	'''
	Last record of every (address_id, isp) pair, in file order
	'''

	latest = {}
	for i, record in enumerate(records):
		latest[record.pair()] = (i, record)
	#end

	return [record for i, record in sorted(latest.values(), key=lambda entry: entry[0])]


#==============================================================================
# read_dataset function
#==============================================================================
def read_dataset(filename):

	'''
	Records of a dataset file, a retried pair keeping its last record
	'''

	with Dataset(filename,'r') as dataset:
		return latest_records(dataset.read())
	#end




#==============================================================================
# Dataset History Test
#==============================================================================
if __name__ == '__main__':

	print('Testing Dataset History...')
	print(DatasetRecord('a1','220710017001','New Orleans','AT&T','Hit',[Plan(1000,1000,80,'fiber')]))
