#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import print_function, absolute_import, division

# pylint:disable=too-many-public-methods

import math
import unittest

import numpy as np

from hamcrest import assert_that
from hamcrest import is_
from hamcrest import calling
from hamcrest import raises
from hamcrest import close_to
from hamcrest import contains_string
from hamcrest import less_than_or_equal_to
from hamcrest import greater_than

from nti.testing.matchers import validly_provides

from ..interfaces import IKernel
from ..interfaces import DomainError
from ..kernels import Gaussian
from ..kernels import Quadratic
from ..kernels import SmoothedIndicator
from ..kernels import kernel_eval
from ..kernels import kernel_curvature


def central_gradient(func, z, h=1e-6):
    z = np.asarray(z, dtype=float)
    result = np.empty_like(z)
    for c in range(len(z)):
        step = np.zeros_like(z)
        step[c] = h
        result[c] = (func(z + step) - func(z - step)) / (2 * h)
    return result


class TestGaussian(unittest.TestCase):

    def test_provides(self):
        assert_that(Gaussian(), validly_provides(IKernel))

    def test_origin(self):
        value, gradient, _ = kernel_eval(Gaussian(100, 100), [0.0, 0.0])
        assert_that(float(value), is_(100.0))
        assert_that(gradient.tolist(), is_([0.0, 0.0]))

    def test_unit(self):
        value, gradient, _ = kernel_eval(Gaussian(1, 1), [1.0, 0.0])
        assert_that(float(value), close_to(math.exp(-1), 1e-15))
        assert_that(gradient[0], close_to(-2 * math.exp(-1), 1e-15))
        assert_that(gradient[1], is_(0.0))

    def test_curvature(self):
        assert_that(kernel_curvature(Gaussian(100, 100)), is_(20000.0))
        assert_that(kernel_curvature(Gaussian(1, 1)), is_(2.0))

    def test_rejects_non_finite(self):
        assert_that(calling(kernel_eval).with_args(Gaussian(), [np.nan, 0.0]),
                    raises(DomainError))
        assert_that(calling(kernel_eval).with_args(Gaussian(), [np.inf, 0.0]),
                    raises(DomainError))

    def test_rejects_bad_parameters(self):
        assert_that(calling(Gaussian).with_args(0, 1), raises(DomainError))
        assert_that(calling(Gaussian).with_args(1, -1), raises(DomainError))

    def test_derivatives_match_differences(self):
        kernel = Gaussian(1.5, 0.7)
        rng = np.random.default_rng(1)
        for z in rng.normal(size=(20, 2)):
            _, gradient, hessian = kernel.evaluate(z)
            fd = central_gradient(kernel.value, z)
            assert_that(np.max(np.abs(fd - gradient)),
                        less_than_or_equal_to(1e-6 * max(1.0, np.max(np.abs(gradient)))))
            rows = np.array([central_gradient(lambda w, c=c: kernel.gradient(w)[c], z)
                             for c in range(2)])
            assert_that(np.max(np.abs(rows - hessian)),
                        less_than_or_equal_to(1e-5 * max(1.0, np.max(np.abs(hessian)))))

    def test_hessian_vector(self):
        kernel = Gaussian(2, 3)
        rng = np.random.default_rng(2)
        z = rng.normal(size=(5, 3))
        v = rng.normal(size=(5, 3))
        expected = np.einsum('...ab,...b->...a', kernel.hessian(z), v)
        assert_that(np.max(np.abs(kernel.hessian_vector(z, v) - expected)),
                    less_than_or_equal_to(1e-12))

    def test_curvature_dominates(self):
        kernel = Gaussian(1, 1)
        z = np.random.default_rng(3).uniform(-5, 5, size=(10 ** 4, 2))
        norms = np.linalg.norm(kernel.hessian(z), ord=2, axis=(-2, -1))
        assert_that(float(np.max(norms)), less_than_or_equal_to(kernel.curvature))

    def test_equality(self):
        assert_that(Gaussian(1, 2), is_(Gaussian(1, 2)))
        assert_that(Gaussian(1, 2) != Gaussian(2, 1), is_(True))
        assert_that(hash(Gaussian(1, 2)), is_(hash(Gaussian(1.0, 2.0))))
        assert_that(repr(Gaussian(1, 2)), contains_string('amplitude=1.0'))


class TestQuadratic(unittest.TestCase):

    def test_provides(self):
        assert_that(Quadratic(), validly_provides(IKernel))

    def test_unit(self):
        value, gradient, hessian = kernel_eval(Quadratic(), [1.0, 0.0])
        assert_that(float(value), is_(0.5))
        assert_that(gradient.tolist(), is_([1.0, 0.0]))
        assert_that(hessian.tolist(), is_(np.eye(2).tolist()))

    def test_curvature(self):
        assert_that(kernel_curvature(Quadratic()), is_(1.0))

    def test_batched(self):
        z = np.arange(12, dtype=float).reshape(2, 3, 2)
        value, gradient, hessian = Quadratic().evaluate(z)
        assert_that(value.shape, is_((2, 3)))
        assert_that(gradient.shape, is_((2, 3, 2)))
        assert_that(hessian.shape, is_((2, 3, 2, 2)))


class TestSmoothedIndicator(unittest.TestCase):

    kernel = SmoothedIndicator(radius=1.0, width=0.25)

    def test_provides(self):
        assert_that(self.kernel, validly_provides(IKernel))

    def test_plateau_and_support(self):
        inside = float(self.kernel.value([0.0, 0.0]))
        outside = float(self.kernel.value([1.5, 0.0]))
        assert_that(inside, greater_than(0.5))
        assert_that(outside, is_(0.0))

    def test_radial(self):
        a = float(self.kernel.value([0.6, 0.8]))
        b = float(self.kernel.value([1.0, 0.0]))
        assert_that(a, close_to(b, 1e-12))

    def test_derivatives_match_differences(self):
        kernel = self.kernel
        for z in ([0.9, 0.1], [0.7, -0.6], [-1.05, 0.05], [0.3, 0.95]):
            z = np.array(z)
            _, gradient, hessian = kernel.evaluate(z)
            fd = central_gradient(kernel.value, z, h=1e-5)
            assert_that(np.max(np.abs(fd - gradient)),
                        less_than_or_equal_to(1e-3 * max(1.0, np.max(np.abs(gradient)))))
            rows = np.array([central_gradient(lambda w, c=c: kernel.gradient(w)[c], z, h=1e-5)
                             for c in range(2)])
            assert_that(np.max(np.abs(rows - hessian)),
                        less_than_or_equal_to(1e-3 * max(1.0, np.max(np.abs(hessian)))))

    def test_plateau_is_exact(self):
        for rho in (0.0, 0.3, 0.5, 0.75):
            assert_that(float(self.kernel.value([rho, 0.0])), close_to(1.0, 1e-12))
        line = SmoothedIndicator(radius=1.0, width=0.25, dim=1)
        for z in (0.0, 0.3, -0.75):
            assert_that(float(line.value([z])), close_to(1.0, 1e-12))

    def test_default_nodes_converged(self):
        fine = SmoothedIndicator(radius=1.0, width=0.25, nodes=128)
        rho = np.linspace(0.0, 1.3, 27)
        z = np.stack([rho, np.zeros_like(rho)], axis=-1)
        mine = self.kernel.evaluate(z)
        theirs = fine.evaluate(z)
        assert_that(float(np.max(np.abs(mine[0] - theirs[0]))), less_than_or_equal_to(1e-3))
        # The gradient peaks near 1 / (2 delta), the Hessian near 1 / delta**2.
        assert_that(float(np.max(np.abs(mine[1] - theirs[1]))), less_than_or_equal_to(2e-3))
        assert_that(float(np.max(np.abs(mine[2] - theirs[2]))), less_than_or_equal_to(2e-2))
        # Mollifying a disk moves the edge value just below one half.
        edge = float(fine.value([1.0, 0.0]))
        assert_that(edge, less_than_or_equal_to(0.5))
        assert_that(edge, greater_than(0.47))

    def test_line(self):
        kernel = SmoothedIndicator(radius=1.0, width=0.25, dim=1)
        value, gradient, hessian = kernel.evaluate(np.array([[0.95]]))
        fd = central_gradient(lambda w: kernel.value(w[None])[0], np.array([0.95]), h=1e-5)
        assert_that(gradient[0, 0], close_to(fd[0], 1e-3 * max(1.0, abs(fd[0]))))
        assert_that(value.shape, is_((1,)))
        assert_that(hessian.shape, is_((1, 1, 1)))
        # At the edge of a segment the mollified value is exactly one half.
        assert_that(float(kernel.value([1.0])), close_to(0.5, 1e-3))
        assert_that(float(kernel.value([1.3])), is_(0.0))

    def test_curvature_dominates(self):
        kernel = self.kernel
        rng = np.random.default_rng(4)
        radius = rng.uniform(0, 1.4, size=2000)
        angle = rng.uniform(0, 2 * np.pi, size=2000)
        z = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=-1)
        norms = np.linalg.norm(kernel.hessian(z), ord=2, axis=(-2, -1))
        assert_that(float(np.max(norms)),
                    less_than_or_equal_to(kernel_curvature(kernel) * (1 + 1e-6)))

    def test_rejects_bad_parameters(self):
        assert_that(calling(SmoothedIndicator).with_args(radius=0), raises(DomainError))
        assert_that(calling(SmoothedIndicator).with_args(nodes=1), raises(DomainError))
        assert_that(calling(SmoothedIndicator).with_args(dim=0), raises(DomainError))


if __name__ == '__main__':
    unittest.main()
