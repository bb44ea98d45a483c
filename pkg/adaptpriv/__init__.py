# -*- coding: utf-8 -*-

"""Top-level package for adaptive-privacy."""

__version__ = '0.1.1'

from adaptpriv import excs
from adaptpriv import loggers
from adaptpriv import types
from adaptpriv import probability
from adaptpriv import ba_distortion
from adaptpriv import ba_mutual_info
from adaptpriv import curves
from adaptpriv import targets
from adaptpriv import sessions
from adaptpriv import exports
from adaptpriv import config
from adaptpriv import commands
