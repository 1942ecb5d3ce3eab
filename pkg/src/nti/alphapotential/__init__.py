#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Alpha-potential distributed stochastic differential games.

"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

import os

logger = __import__('logging').getLogger(__name__)

#: The seed used by the shipped presets.
DEFAULT_SEED = 2025

#: Iterations whose commit phase (parameter update, log append,
#: checkpoint) takes longer than this many seconds log a warning.
DEFAULT_LONG_RUNNING_COMMIT_IN_SECS = 6

#: Environment variable bounding the worker threads used to
#: generate per-trajectory noise.
THREADS_ENVIRON_KEY = 'NTI_ALPHAPOTENTIAL_THREADS'


def worker_count(default=1):
    """
    The number of worker threads requested through
    :data:`THREADS_ENVIRON_KEY`, or *default*. Results never depend on
    this value.
    """
    value = os.environ.get(THREADS_ENVIRON_KEY)
    if not value:
        return default
    try:
        count = int(value)
    except ValueError:
        logger.warning("Ignoring invalid %s=%r", THREADS_ENVIRON_KEY, value)
        return default
    return max(1, count)
