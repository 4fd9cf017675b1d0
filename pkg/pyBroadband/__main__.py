#!/usr/bin/env python

import sys

from pyBroadband.pyBroadband_cli import main

sys.exit(main())
