#!/usr/bin/env python

try:
    from .pyHTTP import HttpTransport
    __all__ = ['HttpTransport']
except:
    __all__ = []
#end
