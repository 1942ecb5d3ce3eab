#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Quadrature rules on ``[0, 1]`` for the scaling variable ``r`` of the
potential integrands.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

import numpy as np
from numpy.polynomial.legendre import leggauss

from .interfaces import DomainError

__all__ = [
    'QuadratureRule',
    'gauss_legendre',
    'MIDPOINT',
    'DEFAULT_NODES',
]

#: The default number of Gauss-Legendre nodes.
DEFAULT_NODES = 16


class QuadratureRule(object):
    """
    Nodes in ``(0, 1)`` and positive weights summing to one.

    An *n*-node Gauss-Legendre rule integrates polynomials of degree up
    to ``2n - 1`` exactly.
    """

    __slots__ = ('nodes', 'weights')

    def __init__(self, nodes, weights):
        nodes = np.array(nodes, dtype=float).ravel()
        weights = np.array(weights, dtype=float).ravel()
        if nodes.shape != weights.shape or not nodes.size:
            raise DomainError("Quadrature nodes and weights must be non-empty and match")
        if np.any(nodes <= 0) or np.any(nodes >= 1) or np.any(weights <= 0):
            raise DomainError("Quadrature nodes must lie in (0, 1) with positive weights")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        self.nodes = nodes
        self.weights = weights

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(zip(self.nodes.tolist(), self.weights.tolist()))

    def __eq__(self, other):
        return (isinstance(other, QuadratureRule)
                and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.weights, other.weights))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def integrate(self, func):
        """
        Apply the rule to ``func(r)``, summing in node order.
        """
        total = 0.0
        for r, w in self:
            total = total + w * func(r)
        return total

    def __repr__(self):
        return '<%s.%s nodes=%d>' % (type(self).__module__, type(self).__name__, len(self))


def gauss_legendre(n=DEFAULT_NODES):
    """
    The *n*-node Gauss-Legendre rule mapped to ``[0, 1]``.
    """
    n = int(n)
    if n < 1:
        raise DomainError("A quadrature rule needs at least one node")
    x, w = leggauss(n)
    return QuadratureRule(0.5 * (x + 1.0), 0.5 * w)

#: The one-node rule ``r = 1/2``. It is exact for affine integrands,
#: which is the closed form for quadratic costs and the quadratic
#: kernel.
MIDPOINT = QuadratureRule([0.5], [1.0])
