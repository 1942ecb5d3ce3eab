#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Interaction kernels, their derivatives, and curvature constants.

Three kernels are provided:

:class:`Gaussian`
    ``A exp(-rate |z|^2)``, the aversion kernel.
:class:`SmoothedIndicator`
    The indicator of the ball of radius ``r`` convolved with a
    compactly supported bump of width ``delta``; a personal-space
    aversion.
:class:`Quadratic`
    ``|z|^2 / 2``, the flocking kernel.

Every kernel evaluates batched: the trailing axis of ``z`` is the
spatial dimension.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize_scalar
from scipy.special import gamma as gamma_function

from zope.interface import implementer
from zope.cachedescriptors.property import Lazy

from .interfaces import IKernel
from .interfaces import DomainError

__all__ = [
    'Gaussian',
    'SmoothedIndicator',
    'Quadratic',
    'kernel_eval',
    'kernel_curvature',
]


def _positive(name, value):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise DomainError("%s must be positive and finite, not %r" % (name, value))
    return value


class _AbstractKernel(object):

    def _check(self, z):
        z = np.asarray(z, dtype=float)
        if z.ndim == 0:
            z = z.reshape(1)
        if not np.all(np.isfinite(z)):
            raise DomainError("Kernel argument must be finite")
        return z

    def evaluate(self, z):
        raise NotImplementedError

    def hessian_vector(self, z, v):
        hess = self.evaluate(z)[2]
        return np.einsum('...ab,...b->...a', hess, np.asarray(v, dtype=float))

    def value_and_gradient(self, z):
        value, gradient, _ = self.evaluate(z)
        return value, gradient

    def value(self, z):
        return self.evaluate(z)[0]

    def gradient(self, z):
        return self.evaluate(z)[1]

    def hessian(self, z):
        return self.evaluate(z)[2]

    def __eq__(self, other):
        # pylint:disable=protected-access
        return type(self) is type(other) and self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((type(self), self._key()))

    def _key(self):
        raise NotImplementedError

    def __repr__(self):
        return '%s(%s)' % (
            type(self).__name__,
            ', '.join('%s=%r' % kv for kv in zip(self._fields, self._key()))
        )

    _fields = ()


@implementer(IKernel)
class Gaussian(_AbstractKernel):
    """
    ``K(z) = amplitude * exp(-rate * |z|^2)``.

    The curvature is the closed form ``2 * amplitude * rate``, attained
    at the origin.
    """

    _fields = ('amplitude', 'rate')

    def __init__(self, amplitude=1.0, rate=1.0):
        self.amplitude = _positive('amplitude', amplitude)
        self.rate = _positive('rate', rate)

    def _key(self):
        return (self.amplitude, self.rate)

    def evaluate(self, z):
        z = self._check(z)
        value = self.amplitude * np.exp(-self.rate * np.sum(z * z, axis=-1))
        gradient = (-2.0 * self.rate) * value[..., None] * z
        eye = np.eye(z.shape[-1])
        outer = z[..., :, None] * z[..., None, :]
        hessian = value[..., None, None] * (
            (4.0 * self.rate ** 2) * outer - (2.0 * self.rate) * eye)
        return value, gradient, hessian

    def hessian_vector(self, z, v):
        z = self._check(z)
        v = np.asarray(v, dtype=float)
        value = self.amplitude * np.exp(-self.rate * np.sum(z * z, axis=-1))
        zv = np.sum(z * v, axis=-1)
        return value[..., None] * (
            (4.0 * self.rate ** 2) * z * zv[..., None] - (2.0 * self.rate) * v)

    def value_and_gradient(self, z):
        z = self._check(z)
        value = self.amplitude * np.exp(-self.rate * np.sum(z * z, axis=-1))
        return value, (-2.0 * self.rate) * value[..., None] * z

    @Lazy
    def curvature(self):
        return 2.0 * self.amplitude * self.rate


@implementer(IKernel)
class Quadratic(_AbstractKernel):
    """
    ``K(z) = |z|^2 / 2``. The Hessian is the identity.
    """

    def _key(self):
        return ()

    def evaluate(self, z):
        z = self._check(z)
        value = 0.5 * np.sum(z * z, axis=-1)
        hessian = np.broadcast_to(np.eye(z.shape[-1]), z.shape + (z.shape[-1],)).copy()
        return value, z.copy(), hessian

    def hessian_vector(self, z, v):
        self._check(z)
        return np.array(v, dtype=float)

    def value_and_gradient(self, z):
        z = self._check(z)
        return 0.5 * np.sum(z * z, axis=-1), z.copy()

    curvature = 1.0


def _bump(u):
    """
    The unnormalized bump ``exp(-1/(1-u^2))`` on ``u < 1`` and its first
    and second derivatives.
    """
    inside = u < 1.0
    w = np.where(inside, 1.0 - u * u, 1.0)
    g = np.where(inside, np.exp(-1.0 / w), 0.0)
    g1 = np.where(inside, g * (-2.0 * u / w ** 2), 0.0)
    g2 = np.where(inside, g * (6.0 * u ** 4 - 2.0) / w ** 4, 0.0)
    return g, g1, g2


def _sphere_area(dim):
    "Surface area of the unit sphere in R^dim."
    return 2.0 * np.pi ** (dim / 2.0) / gamma_function(dim / 2.0)


@implementer(IKernel)
class SmoothedIndicator(_AbstractKernel):
    """
    The indicator of the ball of radius *radius*, mollified by the
    standard bump ``exp(-1/(1-|v|^2))`` rescaled to width *width*
    and normalized to unit mass.

    The convolution is integrated over the support of the mollifier,
    ``K(z) = int_{|u|<delta} gamma_delta(u) 1{|z - u| < r} du``, and
    the gradient and Hessian over the same support with the derivatives
    of ``gamma_delta`` in place of ``gamma_delta``. For ``d >= 2`` the
    integrals are written in polar coordinates around the axis through
    ``z``: the indicator bounds the polar angle, which is integrated
    with *nodes* Gauss-Legendre points, and the radius ``|u|`` is split
    where that bound has kinks, with *nodes* points per piece. In one
    dimension the gradient and Hessian are exact differences of the
    mollifier at ``z +- r``.

    The rule that normalizes the mollifier is the one used on the
    plateau, so ``K`` is one to rounding wherever ``|z| <= r - delta``.

    The kernel is evaluated for the spatial dimension of its argument;
    the mollifier normalization is computed (and cached) per dimension.
    """

    _fields = ('radius', 'width', 'nodes', 'dim')

    #: Points on the radial grid searched for the curvature.
    curvature_grid = 2049

    def __init__(self, radius=1.0, width=0.25, nodes=16, dim=2):
        self.radius = _positive('radius', radius)
        self.width = _positive('width', width)
        self.nodes = int(nodes)
        if self.nodes < 2:
            raise DomainError("At least two quadrature nodes are required")
        self._normalizers = {}
        #: The spatial dimension the curvature is computed for.
        self.dim = int(dim)
        if self.dim < 1:
            raise DomainError("The spatial dimension must be positive")

    def _key(self):
        return (self.radius, self.width, self.nodes, self.dim)

    @Lazy
    def _legendre(self):
        return leggauss(self.nodes)

    def _clustered_rule(self, lo, hi):
        """
        Gauss-Legendre in ``theta`` for ``s = lo + (hi - lo)(1 - cos theta)/2``.

        The nodes crowd both ends, where the integrands have square
        root kinks.
        """
        x, w = self._legendre
        theta = 0.5 * np.pi * (x + 1.0)
        half = 0.5 * (np.asarray(hi, dtype=float) - lo)
        s = lo + half * (1.0 - np.cos(theta))
        weights = half * np.sin(theta) * (0.5 * np.pi * w)
        return s, weights

    def _normalizer(self, dim):
        try:
            return self._normalizers[dim]
        except KeyError:
            # Same rule as the plateau, so K is exactly one there.
            s, w = self._clustered_rule(0.0, 1.0)
            mass = _sphere_area(dim) * np.sum(w * _bump(s)[0] * s ** (dim - 1))
            result = self._normalizers[dim] = 1.0 / mass
            return result

    def _mollifier(self, s, dim):
        "gamma_delta and its first two radial derivatives at distance *s*."
        delta = self.width
        scale = self._normalizer(dim) / delta ** dim
        g, g1, g2 = _bump(s / delta)
        return scale * g, scale * g1 / delta, scale * g2 / delta ** 2

    def radial_profile(self, rho, dim=2):
        """
        Return ``(k, k', k'')`` of the radial profile ``K(z) = k(|z|)``
        at the distances *rho* (``dim >= 2``).
        """
        rho = np.asarray(rho, dtype=float)[..., None]
        x, w = self._legendre
        r, delta = self.radius, self.width
        # The angular limit is not smooth at the radii where the sphere
        # of radius s around z touches the boundary of the ball.
        kinks = np.sort(np.clip(np.concatenate([np.abs(r - rho), r + rho], axis=-1),
                                0.0, delta), axis=-1)
        edges = np.concatenate([np.zeros_like(rho), kinks, np.full_like(rho, delta)], axis=-1)
        s, ws = self._clustered_rule(edges[..., :-1, None], edges[..., 1:, None])
        s = s.reshape(rho.shape[:-1] + (-1,))
        ws = ws.reshape(s.shape)
        # z - u is inside the ball when the angle between u and z is
        # below psi_max.
        cos_max = (rho * rho + s * s - r * r) / np.maximum(2.0 * rho * s, 1e-300)
        psi_max = np.arccos(np.clip(cos_max, -1.0, 1.0))[..., None]
        psi = 0.5 * psi_max * (x + 1.0)
        sin = np.sin(psi)
        cos = np.cos(psi)
        sphere = 0.5 * psi_max * w * sin ** (dim - 2)
        g, g1, g2 = self._mollifier(s, dim)
        positive = s > 0
        slope = np.where(positive, g1 / np.where(positive, s, 1.0), g2)
        radial = _sphere_area(dim - 1) * ws * s ** (dim - 1)
        k = np.sum(radial * g * np.sum(sphere, axis=-1), axis=-1)
        k1 = np.sum(radial * g1 * np.sum(sphere * cos, axis=-1), axis=-1)
        k2 = np.sum(radial * (g2 * np.sum(sphere * cos * cos, axis=-1)
                              + slope * np.sum(sphere * sin * sin, axis=-1)), axis=-1)
        return k, k1, k2

    def _evaluate_line(self, z):
        r, delta = self.radius, self.width
        lo = np.clip(z - r, -delta, delta)
        hi = np.clip(z + r, -delta, delta)
        mid = np.clip(0.0, lo, hi)
        u, wu = self._clustered_rule(np.concatenate([lo, mid], axis=-1)[..., None],
                                     np.concatenate([mid, hi], axis=-1)[..., None])
        value = np.sum(wu * self._mollifier(np.abs(u), 1)[0], axis=(-2, -1))
        ahead = self._mollifier(np.abs(z + r), 1)
        behind = self._mollifier(np.abs(z - r), 1)
        gradient = ahead[0] - behind[0]
        hessian = ahead[1] * np.sign(z + r) - behind[1] * np.sign(z - r)
        return value, gradient, hessian[..., None]

    def evaluate(self, z):
        z = self._check(z)
        dim = z.shape[-1]
        if dim == 1:
            return self._evaluate_line(z)
        rho = np.sqrt(np.sum(z * z, axis=-1))
        k, k1, k2 = self.radial_profile(rho, dim)
        tiny = 1e-9 * self.radius
        at_origin = rho < tiny
        safe = np.where(at_origin, 1.0, rho)
        unit = z / safe[..., None]
        radial = unit[..., :, None] * unit[..., None, :]
        eye = np.eye(dim)
        tangential = np.where(at_origin, k2, k1 / safe)
        gradient = np.where(at_origin[..., None], 0.0, k1[..., None] * unit)
        hessian = np.where(
            at_origin[..., None, None],
            k2[..., None, None] * eye,
            k2[..., None, None] * radial + tangential[..., None, None] * (eye - radial))
        return k, gradient, hessian

    def _spectral(self, rho):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        if self.dim == 1:
            return np.abs(self._evaluate_line(rho[:, None])[2][:, 0, 0])
        _, k1, k2 = self.radial_profile(rho, self.dim)
        safe = np.where(rho > 0, rho, 1.0)
        tangential = np.where(rho > 0, k1 / safe, k2)
        return np.maximum(np.abs(k2), np.abs(tangential))

    @Lazy
    def curvature(self):
        # K vanishes identically beyond radius + width, so the radial
        # search covers every z. Local maxima of the grid are refined.
        top = self.radius + self.width
        grid = np.linspace(0.0, top, self.curvature_grid)
        norms = self._spectral(grid)
        best = float(np.max(norms))
        step = grid[1] - grid[0]
        interior = np.flatnonzero(
            (norms[1:-1] >= norms[:-2]) & (norms[1:-1] >= norms[2:])) + 1
        candidates = set(interior.tolist())
        candidates.update((0, len(grid) - 1, int(np.argmax(norms))))
        for index in sorted(candidates, key=lambda i: -norms[i])[:8]:
            lo = max(0.0, grid[index] - step)
            hi = min(top, grid[index] + step)
            found = minimize_scalar(lambda r: -float(self._spectral(r)[0]),
                                    bounds=(lo, hi), method='bounded',
                                    options={'xatol': 1e-12 * top})
            best = max(best, -float(found.fun))
        logger.debug("Curvature of %r searched to %s", self, best)
        return best


def kernel_eval(kernel, z):
    """
    Evaluate *kernel* at *z*: ``(value, gradient, hessian)``.

    :raises DomainError: If *z* is not finite.
    """
    return kernel.evaluate(z)


def kernel_curvature(kernel):
    """
    The supremum over ``z`` of the spectral norm of the kernel Hessian.
    """
    return float(kernel.curvature)
