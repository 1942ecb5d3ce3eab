# -*- coding: utf-8 -*-
"""
Constants to use for logging levels.

``TRACE`` sits below ``DEBUG`` and is used for per-step detail of
the simulator and the tape.
"""
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import logging

TRACE = 5

if logging.getLevelName(TRACE) != 'TRACE':
    logging.addLevelName(TRACE, 'TRACE')

__all__ = [
    'TRACE',
]
