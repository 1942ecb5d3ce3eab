#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import print_function, absolute_import, division

import unittest

import numpy as np

from hamcrest import assert_that
from hamcrest import is_
from hamcrest import calling
from hamcrest import raises
from hamcrest import close_to

from nti.testing.matchers import has_length

from ..interfaces import DomainError
from ..quadrature import DEFAULT_NODES
from ..quadrature import MIDPOINT
from ..quadrature import QuadratureRule
from ..quadrature import gauss_legendre


class TestGaussLegendre(unittest.TestCase):

    def test_default(self):
        rule = gauss_legendre()
        assert_that(rule, has_length(DEFAULT_NODES))
        assert_that(float(np.sum(rule.weights)), close_to(1.0, 1e-14))

    def test_exact_to_degree(self):
        for n in (1, 2, 4, 8):
            rule = gauss_legendre(n)
            for degree in range(2 * n):
                value = rule.integrate(lambda r, p=degree: r ** p)
                assert_that(value, close_to(1.0 / (degree + 1), 1e-13))

    def test_midpoint(self):
        assert_that(MIDPOINT.integrate(lambda r: 3 * r + 1), is_(2.5))
        assert_that(gauss_legendre(1), is_(MIDPOINT))

    def test_rejects(self):
        assert_that(calling(gauss_legendre).with_args(0), raises(DomainError))
        assert_that(calling(QuadratureRule).with_args([0.0], [1.0]), raises(DomainError))
        assert_that(calling(QuadratureRule).with_args([0.5], [-1.0]), raises(DomainError))
        assert_that(calling(QuadratureRule).with_args([0.5, 0.6], [1.0]), raises(DomainError))


if __name__ == '__main__':
    unittest.main()
