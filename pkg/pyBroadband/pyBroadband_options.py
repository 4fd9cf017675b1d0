#!/usr/bin/env python
'''
pyBroadband_options

Holds the typed Options Class shared by run configurations.

Copyright (c) 2023 by pyBroadband Developers
All rights reserved.
Revision: 1.1   $Date: 02/04/2023 21:00$


History
-------
    v. 1.0  - Initial Class Creation (2023)
    v. 1.1  - Added YAML Loading (2023)
'''

__version__ = '$Revision: $'

# =============================================================================
# Standard Python modules
# =============================================================================
import os, sys
import copy
import logging

# =============================================================================
# External Python modules
# =============================================================================
import yaml

# =============================================================================
# Extension modules
# =============================================================================
from pyBroadband.pyBroadband_error import ConfigInvalid, FileMissing

# =============================================================================
# Misc Definitions
# =============================================================================
logger = logging.getLogger(__name__)


# =============================================================================
# Options Class
# =============================================================================
class Options(object):

    '''
    Abstract Class for typed Options Objects
    '''

    def __init__(self, name='', def_options=None, *args, **kwargs):

        '''
        Options Class Initialization

        **Keyword arguments:**

        - name -> STR: Options set name, *Default* = ''
        - def_options -> DICT: Default options as name: [type, value], *Default* = None (no options)

        Any *options* keyword dictionary is applied through setOption.
        '''

        #
        if def_options is None:
            def_options = {}
        #end
        self.name = name
        self.options = {}
        self.options['defaults'] = def_options

        # Initialize Options
        for key in list(def_options.keys()):
            self.options[key] = copy.deepcopy(def_options[key])
        #end
        koptions = kwargs.pop('options',{})
        for key in list(koptions.keys()):
            self.setOption(key,koptions[key])
        #end


    def _on_setOption(self, name, value):

        '''
        Set Option Value (Options Specific Routine)

        **Arguments:**

        - name -> STR: Option name
        - value ->   : Option value
        '''

        pass


    def setOption(self, name, value=None):

        '''
        Set Option Value (Calling Routine)

        Integers are accepted where floats are expected; anything else must
        match the default's type exactly.

        **Arguments:**

        - name -> STR: Option Name

        **Keyword arguments:**

        - value -> FLOAT/INT/BOOL/STR/LIST/DICT: Option Value, *Default* = None
        '''

        #
        def_options = self.options['defaults']
        if name in def_options:
            otype = def_options[name][0]
            if (otype == float) and isinstance(value,int) and not isinstance(value,bool):
                value = float(value)
            #end
            if not ((type(value) == otype) or ((value is None) and (def_options[name][1] is None))):
                raise ConfigInvalid('Incorrect ' + repr(name) + ' value type')
            #end
        else:
            raise ConfigInvalid(repr(name) + ' is not a valid option name'+', valid names are: '+str(sorted(def_options.keys())))
        #end

        # a rejected value leaves the stored one untouched
        self._on_setOption(name, value)
        self.options[name] = [otype,value]


    def getOption(self, name):

        '''
        Get Option Value

        **Arguments:**

        - name -> STR: Option name
        '''

        #
        def_options = self.options['defaults']
        if name in def_options:
            return self.options[name][1]
        else:
            raise ConfigInvalid(repr(name) + ' is not a valid option name')
        #end


    def update(self, values):

        '''
        Set every entry of a dictionary through setOption

        **Arguments:**

        - values -> DICT: Option values
        '''

        for key in list(values.keys()):
            self.setOption(key,values[key])
        #end


    @classmethod
    def load(cls, path, **kwargs):

        '''
        Load Options from a YAML document

        **Arguments:**

        - path -> STR: YAML file name

        Relative paths found in the document are left as written; callers
        resolve them against the document directory through *basedir*.
        '''

        #
        if not os.path.isfile(path):
            raise FileMissing('Error: configuration file %s does not exist' %(path))
        #end
        with open(path,'r',encoding='utf-8') as fid:
            try:
                doc = yaml.safe_load(fid)
            except yaml.YAMLError as error:
                raise ConfigInvalid('Configuration file %s is not valid YAML: %s' %(path,error))
            #end
        #end
        if doc is None:
            doc = {}
        #end
        if not isinstance(doc,dict):
            raise ConfigInvalid('Configuration file %s must hold a mapping' %(path))
        #end

        self = cls(**kwargs)
        self.basedir = os.path.dirname(os.path.abspath(path))
        self.update(doc)
        logger.debug('loaded %s options from %s', self.name, path)

        return self


    def resolve(self, path):

        '''
        Resolve a path option against the directory of the loaded document
        '''

        if (path is None) or os.path.isabs(path):
            return path
        #end

        return os.path.join(getattr(self,'basedir',os.curdir), path)


    def __str__(self):

        '''
        Print Structured List of Options
        '''

        text = '\n%s Options\n%s\n' %(self.name,'='*60)
        for key in sorted(self.options.keys()):
            if key != 'defaults':
                text += '    %-20s : %s\n' %(key, repr(self.options[key][1]))
            #end
        #end

        return text



#==============================================================================
# Options Test
#==============================================================================
if __name__ == '__main__':

    print('Testing Options...')
    opt = Options('Test',{'workers':[int,50]})
    opt.setOption('workers',10)
    print(opt)
