#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
The domain model of a distributed game.

Player *i* controls the state

.. math::

   dX^i_t = b_i(t) a^i_t dt + \\sigma_i(t) dW_t
            + \\sum_j \\gamma_{ij}(t) d\\tilde N^j_t

where ``W`` is a shared Brownian motion and ``\\tilde N^j`` are
compensated Poisson processes with unit jumps, and pays
``E[int f_i(t, X_t, a_t) dt + g_i(X_T)]``. Only player *i*'s control
enters player *i*'s dynamics; the costs couple everyone.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

from collections import namedtuple

import numpy as np

from zope.interface import implementer
from zope.cachedescriptors.property import Lazy

from .interfaces import ICostDescriptor
from .interfaces import GameSpecError
from .interfaces import ShapeMismatchError
from .interfaces import SymmetryViolation
from .kernels import Quadratic
from .quadrature import MIDPOINT

__all__ = [
    'TimeGrid',
    'Coefficient',
    'GameSpec',
    'CrowdCost',
    'CallbackCost',
    'RunningCostTerms',
    'crowd_running_cost',
]


class TimeGrid(object):
    """
    A uniform grid ``0 = t_0 < ... < t_P = T``.
    """

    __slots__ = ('horizon', 'steps', 'nodes', 'delta')

    def __init__(self, horizon=1.0, steps=50):
        horizon = float(horizon)
        if not np.isfinite(horizon) or horizon <= 0:
            raise GameSpecError("The horizon must be positive and finite, not %r" % horizon)
        if isinstance(steps, bool) or int(steps) != steps or steps < 1:
            raise GameSpecError("The grid needs a positive integer number of steps, not %r"
                                % (steps,))
        self.horizon = horizon
        self.steps = int(steps)
        nodes = np.linspace(0.0, horizon, self.steps + 1)
        nodes.flags.writeable = False
        self.nodes = nodes
        self.delta = horizon / self.steps

    @classmethod
    def from_nodes(cls, nodes):
        """
        Build a grid from explicit nodes, which must start at zero and
        be uniform.
        """
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2 or nodes[0] != 0:
            raise GameSpecError("Grid nodes must start at 0 and contain at least two points")
        gaps = np.diff(nodes)
        if np.any(gaps <= 0) or np.ptp(gaps) > 1e-12 * nodes[-1]:
            raise GameSpecError("Only strictly increasing uniform grids are supported")
        return cls(nodes[-1], len(nodes) - 1)

    @property
    def left_nodes(self):
        "The nodes ``t_0 .. t_{P-1}`` at which actions are taken."
        return self.nodes[:-1]

    def __eq__(self, other):
        return (isinstance(other, TimeGrid)
                and self.horizon == other.horizon
                and self.steps == other.steps)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.horizon, self.steps))

    def __repr__(self):
        return 'TimeGrid(horizon=%r, steps=%r)' % (self.horizon, self.steps)


class Coefficient(object):
    """
    A matrix-valued function of time, either constant or a callback
    ``t -> array``.
    """

    __slots__ = ('_value', '_callback', 'shape')

    def __init__(self, value, shape=None, name='coefficient'):
        if callable(value):
            self._callback = value
            self._value = None
            sample = np.asarray(value(0.0), dtype=float)
        else:
            self._callback = None
            sample = np.array(value, dtype=float)
            if sample.ndim == 1 and shape is not None and len(shape) == 2 and shape[1] == 1:
                sample = sample[:, None]
            sample.flags.writeable = False
            self._value = sample
        if shape is not None and sample.shape != tuple(shape):
            raise GameSpecError("%s has shape %s, expected %s" % (name, sample.shape, tuple(shape)))
        if sample.ndim != 2:
            raise GameSpecError("%s must be a matrix, not shape %s" % (name, sample.shape))
        self.shape = sample.shape

    @property
    def is_constant(self):
        return self._callback is None

    @property
    def constant(self):
        "The constant value, or None for a time-dependent coefficient."
        return self._value

    def at(self, t):
        if self._callback is None:
            return self._value
        value = np.asarray(self._callback(float(t)), dtype=float)
        if value.shape != self.shape:
            raise ShapeMismatchError("Coefficient changed shape at t=%r: %s" % (t, value.shape))
        return value

    def on(self, times):
        "Stack the values at each time: ``[len(times)] + shape``."
        if self._callback is None:
            return np.broadcast_to(self._value, (len(times),) + self.shape).copy()
        return np.stack([self.at(t) for t in times])

    def __repr__(self):
        if self._callback is None:
            return 'Coefficient(%r)' % (self._value.tolist(),)
        return 'Coefficient(%r)' % (self._callback,)


def _per_player(values, n_players, shape, name):
    if callable(values) or np.ndim(values) == len(shape):
        values = [values] * n_players
    values = list(values)
    if len(values) != n_players:
        raise GameSpecError("Expected %d %s coefficients, got %d" % (n_players, name, len(values)))
    return tuple(Coefficient(v, shape, '%s[%d]' % (name, i)) for i, v in enumerate(values))


class GameSpec(object):
    """
    All coefficients of an N-player distributed game.

    :param drift: Player *i*'s ``b_i``, a ``d x k`` matrix or a callback
        of time. A single value is shared by every player.
    :param diffusion: ``sigma_i``, ``d x n`` matrices driven by the shared
        *n*-dimensional Brownian motion.
    :param jump_loadings: ``gamma_i``, ``d x m`` matrices; column *j* is
        the displacement of one jump of source *j*.
    :param intensities: The *m* Poisson intensities ``lambda_j >= 0``.
    :param initial_states: An ``N x d`` array, or a callable taking a
        :class:`numpy.random.Generator` and returning one.
    :param cost: An :class:`~.ICostDescriptor`.
    :param float control_cap: The cap ``U`` on the H^2 norm of each
        player's control, used only by the alpha bounds.
    """

    def __init__(self, n_players, state_dim, action_dim,
                 drift, diffusion, jump_loadings, intensities,
                 initial_states, cost, control_cap=1.0, noise_dim=None):
        # pylint:disable=too-many-arguments
        for name, value in (('n_players', n_players),
                            ('state_dim', state_dim),
                            ('action_dim', action_dim)):
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise GameSpecError("%s must be a positive integer, not %r" % (name, value))
        self.n_players = N = int(n_players)
        self.state_dim = d = int(state_dim)
        self.action_dim = k = int(action_dim)

        intensities = np.array(intensities, dtype=float).ravel()
        if not np.all(np.isfinite(intensities)) or np.any(intensities < 0):
            raise GameSpecError("Jump intensities must be finite and non-negative")
        intensities.flags.writeable = False
        self.intensities = intensities
        m = len(intensities)

        if noise_dim is None:
            first = diffusion if callable(diffusion) or np.ndim(diffusion) == 2 else list(diffusion)[0]
            noise_dim = np.asarray(first(0.0) if callable(first) else first).shape[1]
        self.noise_dim = int(noise_dim)

        self.drift = _per_player(drift, N, (d, k), 'drift')
        self.diffusion = _per_player(diffusion, N, (d, self.noise_dim), 'diffusion')
        if m:
            self.jump_loadings = _per_player(jump_loadings, N, (d, m), 'jump_loadings')
        else:
            self.jump_loadings = tuple(Coefficient(np.zeros((d, 0)), (d, 0)) for _ in range(N))

        if callable(initial_states):
            self.initial_sampler = initial_states
            self.initial_states = None
        else:
            initial = np.array(initial_states, dtype=float)
            if initial.shape == (d,):
                initial = np.tile(initial, (N, 1))
            if initial.shape != (N, d) or not np.all(np.isfinite(initial)):
                raise GameSpecError("Initial states must be a finite %d x %d array" % (N, d))
            initial.flags.writeable = False
            self.initial_sampler = None
            self.initial_states = initial

        if cost is None or not ICostDescriptor.providedBy(cost):
            raise GameSpecError("A cost descriptor is required, not %r" % (cost,))
        if (cost.n_players, cost.state_dim, cost.action_dim) != (N, d, k):
            raise GameSpecError("Cost dimensions %s do not match the game %s" % (
                (cost.n_players, cost.state_dim, cost.action_dim), (N, d, k)))
        self.cost = cost

        control_cap = float(control_cap)
        if not np.isfinite(control_cap) or control_cap <= 0:
            raise GameSpecError("The control cap must be positive and finite")
        self.control_cap = control_cap

    @property
    def state_size(self):
        return self.n_players * self.state_dim

    @property
    def action_size(self):
        return self.n_players * self.action_dim

    @property
    def jump_sources(self):
        return len(self.intensities)

    @Lazy
    def is_deterministic(self):
        """
        True if no constant noise coefficient is non-zero and the
        initial state is deterministic. Time-dependent coefficients are
        assumed random.
        """
        if self.initial_sampler is not None:
            return False
        for coefficients in (self.diffusion, self.jump_loadings):
            for c in coefficients:
                if not c.is_constant or np.any(c.constant != 0):
                    return False
        return True

    def drift_blocks(self, grid):
        "``b_i(t_l)`` for ``l < P``: ``[P, N, d, k]``."
        return np.stack([c.on(grid.left_nodes) for c in self.drift], axis=1)

    def diffusion_blocks(self, grid):
        "``sigma_i(t_l)`` for ``l < P``: ``[P, N, d, n]``."
        return np.stack([c.on(grid.left_nodes) for c in self.diffusion], axis=1)

    def jump_blocks(self, grid):
        "``gamma_i(t_l)`` for ``l < P``: ``[P, N, d, m]``."
        return np.stack([c.on(grid.left_nodes) for c in self.jump_loadings], axis=1)

    def drift_matrix(self, grid):
        """
        The block-diagonal joint drift ``[P, N*d, N*k]``.
        """
        blocks = self.drift_blocks(grid)
        N, d, k = self.n_players, self.state_dim, self.action_dim
        result = np.zeros((grid.steps, N * d, N * k))
        for i in range(N):
            result[:, i * d:(i + 1) * d, i * k:(i + 1) * k] = blocks[:, i]
        return result

    def control_effect_norms(self, grid):
        """
        ``B_i = ||b_i||_{L^2(0,T)}`` using the spectral norm and the
        trapezoid rule on *grid*; exact for constant coefficients.
        """
        result = np.empty(self.n_players)
        for i, c in enumerate(self.drift):
            values = c.on(grid.nodes)
            sq = np.linalg.norm(values, ord=2, axis=(-2, -1)) ** 2
            result[i] = np.sqrt(np.sum(0.5 * (sq[1:] + sq[:-1])) * grid.delta)
        return result

    def validate(self, grid):
        """
        Check that the drift and diffusion coefficients have finite
        Riemann sums of their squared norms on *grid*.

        :raises GameSpecError: Otherwise.
        """
        for name, coefficients in (('drift', self.drift), ('diffusion', self.diffusion),
                                   ('jump_loadings', self.jump_loadings)):
            for i, c in enumerate(coefficients):
                values = c.on(grid.left_nodes)
                total = np.sum(values * values) * grid.delta
                if not np.isfinite(total):
                    raise GameSpecError("%s[%d] is not square integrable on [0, %r]"
                                        % (name, i, grid.horizon))
        return self

    def __repr__(self):
        return '<%s.%s N=%d d=%d k=%d n=%d m=%d cost=%r>' % (
            type(self).__module__, type(self).__name__,
            self.n_players, self.state_dim, self.action_dim,
            self.noise_dim, self.jump_sources, self.cost)


def _players(x, n_players, dim):
    x = np.asarray(x, dtype=float)
    return x.reshape(x.shape[:-1] + (n_players, dim))


@implementer(ICostDescriptor)
class CrowdCost(object):
    """
    The crowd-motion cost

    .. math::

       f_i(t, x, a) = \\frac{c^\\ell_i}{2} |a_i|^2
           + \\frac{1}{N-1} \\sum_{j \\ne i} q_{ij} K(x_i - x_j),
       \\qquad g_i(x) = c_i |x_i - z_i|^2 .
    """

    def __init__(self, control_weights, kernel, interaction,
                 terminal_weights, targets, action_dim=None):
        targets = np.array(targets, dtype=float)
        if targets.ndim != 2:
            raise GameSpecError("Targets must be an N x d array")
        self.n_players, self.state_dim = N, d = targets.shape
        self.action_dim = d if action_dim is None else int(action_dim)

        def vector(name, value, positive=False):
            value = np.array(value, dtype=float)
            if value.ndim == 0:
                value = np.full(N, float(value))
            if value.shape != (N,) or not np.all(np.isfinite(value)):
                raise GameSpecError("%s must be a finite vector of length %d" % (name, N))
            if np.any(value < 0) or (positive and np.any(value == 0)):
                raise GameSpecError("%s must be %s" % (
                    name, 'positive' if positive else 'non-negative'))
            value.flags.writeable = False
            return value

        self.control_weights = vector('control_weights', control_weights)
        self.terminal_weights = vector('terminal_weights', terminal_weights, positive=True)

        q = np.array(interaction, dtype=float)
        if q.ndim == 0:
            q = np.full((N, N), float(q))
            np.fill_diagonal(q, 0.0)
        if q.shape != (N, N) or not np.all(np.isfinite(q)):
            raise GameSpecError("Interaction weights must be a finite %d x %d table" % (N, N))
        if np.any(q < 0):
            raise GameSpecError("Interaction weights must be non-negative")
        if np.any(np.diag(q) != 0):
            raise GameSpecError("Interaction weights must have a zero diagonal")
        q.flags.writeable = False
        self.interaction = q
        targets.flags.writeable = False
        self.targets = targets
        self.kernel = kernel

    @Lazy
    def weights(self):
        "``q / (N - 1)``."
        if self.n_players == 1:
            return np.zeros((1, 1))
        return self.interaction / (self.n_players - 1)

    def _pairs(self, x):
        X = _players(x, self.n_players, self.state_dim)
        return X, X[..., :, None, :] - X[..., None, :, :]

    def running_value(self, t, x, a):
        A = _players(a, self.n_players, self.action_dim)
        _, Z = self._pairs(x)
        values = self.kernel.value_and_gradient(Z)[0]
        control = 0.5 * self.control_weights * np.sum(A * A, axis=-1)
        return control + np.sum(self.weights * values, axis=-1)

    def terminal_value(self, x):
        X = _players(x, self.n_players, self.state_dim)
        diff = X - self.targets
        return self.terminal_weights * np.sum(diff * diff, axis=-1)

    def running_gradient(self, t, x, a):
        x = np.asarray(x, dtype=float)
        A = _players(a, self.n_players, self.action_dim)
        _, Z = self._pairs(x)
        grads = self.kernel.value_and_gradient(Z)[1]
        gx = np.sum(self.weights[..., None] * grads, axis=-2)
        ga = self.control_weights[:, None] * A
        return gx.reshape(x.shape), ga.reshape(np.shape(a))

    def running_gradient_vjp(self, t, x, a, gx_bar, ga_bar):
        x = np.asarray(x, dtype=float)
        _, Z = self._pairs(x)
        G = _players(gx_bar, self.n_players, self.state_dim)
        hv = self.kernel.hessian_vector(Z, np.broadcast_to(G[..., :, None, :], Z.shape))
        hv = self.weights[..., None] * hv
        x_bar = np.sum(hv, axis=-2) - np.sum(hv, axis=-3)
        A_bar = self.control_weights[:, None] * _players(ga_bar, self.n_players, self.action_dim)
        return x_bar.reshape(x.shape), A_bar.reshape(np.shape(ga_bar))

    def terminal_gradient(self, x):
        x = np.asarray(x, dtype=float)
        X = _players(x, self.n_players, self.state_dim)
        return (2.0 * self.terminal_weights[:, None] * (X - self.targets)).reshape(x.shape)

    def terminal_gradient_vjp(self, x, g_bar):
        G = _players(g_bar, self.n_players, self.state_dim)
        return (2.0 * self.terminal_weights[:, None] * G).reshape(np.shape(g_bar))

    def running_value_gradient(self, t, x, a, i):
        x = np.asarray(x, dtype=float)
        a = np.asarray(a, dtype=float)
        X = _players(x, self.n_players, self.state_dim)
        grads = self.kernel.value_and_gradient(X[..., i:i + 1, :] - X)[1]
        weighted = self.weights[i][:, None] * grads
        x_bar = -weighted
        x_bar[..., i, :] = np.sum(weighted, axis=-2)
        A = _players(a, self.n_players, self.action_dim)
        a_bar = np.zeros_like(A)
        a_bar[..., i, :] = self.control_weights[i] * A[..., i, :]
        return x_bar.reshape(x.shape), a_bar.reshape(a.shape)

    def terminal_value_gradient(self, x, i):
        x = np.asarray(x, dtype=float)
        X = _players(x, self.n_players, self.state_dim)
        result = np.zeros_like(X)
        result[..., i, :] = 2.0 * self.terminal_weights[i] * (X[..., i, :] - self.targets[i])
        return result.reshape(x.shape)

    def running_cross_hessian(self, t, x, a, i, j):
        X = _players(x, self.n_players, self.state_dim)
        batch = X.shape[:-2]
        d, k = self.state_dim, self.action_dim
        if i == j:
            hess = self.kernel.evaluate(X[..., i:i + 1, :] - X)[2]
            xx = np.sum(self.weights[i][:, None, None] * hess, axis=-3)
            aa = np.broadcast_to(self.control_weights[i] * np.eye(k), batch + (k, k)).copy()
        else:
            xx = -self.weights[i, j] * self.kernel.evaluate(X[..., i, :] - X[..., j, :])[2]
            aa = np.zeros(batch + (k, k))
        return {
            'xx': xx,
            'xa': np.zeros(batch + (d, k)),
            'ax': np.zeros(batch + (k, d)),
            'aa': aa,
        }

    def terminal_cross_hessian(self, x, i, j):
        X = _players(x, self.n_players, self.state_dim)
        d = self.state_dim
        scale = 2.0 * self.terminal_weights[i] if i == j else 0.0
        return np.broadcast_to(scale * np.eye(d), X.shape[:-2] + (d, d)).copy()

    def running_rule(self, rule):
        return MIDPOINT if isinstance(self.kernel, Quadratic) else rule

    def terminal_rule(self, rule): # pylint:disable=unused-argument
        return MIDPOINT

    @property
    def is_symmetric(self):
        return bool(np.array_equal(self.interaction, self.interaction.T))

    def check_symmetric(self):
        q = self.interaction
        scale = max(1.0, float(np.max(np.abs(q))))
        bad = np.argwhere(np.abs(q - q.T) > 1e-12 * scale)
        if len(bad):
            i, j = sorted(bad[0].tolist())
            raise SymmetryViolation((i, j))
        return True

    def __repr__(self):
        return '<%s N=%d d=%d kernel=%r>' % (
            type(self).__name__, self.n_players, self.state_dim, self.kernel)


RunningCostTerms = namedtuple('RunningCostTerms', 'value grad_x grad_a cross_xx')


def crowd_running_cost(cost, i, x, a):
    """
    Player *i*'s crowd running cost at the joint state *x* and joint
    action *a*, with its own first derivatives and the state cross
    second derivatives.

    :return: A :class:`RunningCostTerms` whose ``cross_xx[j]`` is the
        d x d matrix of second derivatives with respect to ``x_i`` and
        ``x_j`` (including ``j == i``).
    """
    N = cost.n_players
    if not 0 <= i < N:
        raise GameSpecError("Player index %r out of range" % (i,))
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    value = cost.running_value(0.0, x, a)[..., i]
    gx, ga = cost.running_gradient(0.0, x, a)
    d, k = cost.state_dim, cost.action_dim
    cross = np.stack([cost.running_cross_hessian(0.0, x, a, i, j)['xx'] for j in range(N)],
                     axis=-3)
    return RunningCostTerms(value,
                            gx[..., i * d:(i + 1) * d],
                            ga[..., i * k:(i + 1) * k],
                            cross)


@implementer(ICostDescriptor)
class CallbackCost(object):
    """
    A generic cost from batched callbacks.

    :param running: ``(t, x, a) -> [..., N]`` running costs of all players.
    :param running_gradient: ``(t, x, a) -> [..., N, N*d + N*k]``, row
        *i* the full gradient of ``f_i`` (states first, then actions).
    :param running_hessian: ``(t, x, a) -> [..., N, D, D]`` the full
        Hessians, ``D = N*d + N*k``. ``t`` is a float, or an array of
        the batch shape of ``x`` when bounds are sampled.
    :param terminal: ``x -> [..., N]``.
    :param terminal_gradient: ``x -> [..., N, N*d]``.
    :param terminal_hessian: ``x -> [..., N, N*d, N*d]``.
    :keyword bool affine_gradients: Declare that the own gradients are
        affine in ``(x, a)`` so the r-integrals use the exact midpoint
        rule.
    """

    #: The box sampled by :meth:`check_symmetric` and the default box of
    #: sampled derivative bounds.
    box = (-1.0, 1.0)

    def __init__(self, n_players, state_dim, action_dim,
                 running, running_gradient, running_hessian,
                 terminal, terminal_gradient, terminal_hessian,
                 affine_gradients=False, box=None):
        # pylint:disable=too-many-arguments
        self.n_players = int(n_players)
        self.state_dim = int(state_dim)
        self.action_dim = int(action_dim)
        self._running = running
        self._running_gradient = running_gradient
        self._running_hessian = running_hessian
        self._terminal = terminal
        self._terminal_gradient = terminal_gradient
        self._terminal_hessian = terminal_hessian
        self.affine_gradients = bool(affine_gradients)
        if box is not None:
            self.box = tuple(box)

    @Lazy
    def _own(self):
        N, d, k = self.n_players, self.state_dim, self.action_dim
        xs = np.arange(N * d).reshape(N, d)
        acts = N * d + np.arange(N * k).reshape(N, k)
        return xs, acts, np.concatenate([xs, acts], axis=1)

    def running_value(self, t, x, a):
        return np.asarray(self._running(t, x, a), dtype=float)

    def terminal_value(self, x):
        return np.asarray(self._terminal(x), dtype=float)

    def running_gradient(self, t, x, a):
        G = np.asarray(self._running_gradient(t, x, a), dtype=float)
        xs, acts, _ = self._own
        players = np.arange(self.n_players)[:, None]
        gx = G[..., players, xs]
        ga = G[..., players, acts]
        return (gx.reshape(gx.shape[:-2] + (-1,)), ga.reshape(ga.shape[:-2] + (-1,)))

    def running_gradient_vjp(self, t, x, a, gx_bar, ga_bar):
        H = np.asarray(self._running_hessian(t, x, a), dtype=float)
        _, _, own = self._own
        players = np.arange(self.n_players)[:, None]
        rows = H[..., players, own, :]
        bar = np.concatenate([_players(gx_bar, self.n_players, self.state_dim),
                              _players(ga_bar, self.n_players, self.action_dim)], axis=-1)
        total = np.einsum('...nr,...nrD->...D', bar, rows)
        split = self.n_players * self.state_dim
        return total[..., :split], total[..., split:]

    def terminal_gradient(self, x):
        G = np.asarray(self._terminal_gradient(x), dtype=float)
        xs, _, _ = self._own
        gx = G[..., np.arange(self.n_players)[:, None], xs]
        return gx.reshape(gx.shape[:-2] + (-1,))

    def terminal_gradient_vjp(self, x, g_bar):
        H = np.asarray(self._terminal_hessian(x), dtype=float)
        xs, _, _ = self._own
        rows = H[..., np.arange(self.n_players)[:, None], xs, :]
        return np.einsum('...nr,...nrD->...D',
                         _players(g_bar, self.n_players, self.state_dim), rows)

    def running_value_gradient(self, t, x, a, i):
        G = np.asarray(self._running_gradient(t, x, a), dtype=float)[..., i, :]
        split = self.n_players * self.state_dim
        return G[..., :split], G[..., split:]

    def terminal_value_gradient(self, x, i):
        return np.asarray(self._terminal_gradient(x), dtype=float)[..., i, :]

    def running_cross_hessian(self, t, x, a, i, j):
        H = np.asarray(self._running_hessian(t, x, a), dtype=float)[..., i, :, :]
        xs, acts, _ = self._own
        return {
            'xx': H[..., xs[i][:, None], xs[j][None, :]],
            'xa': H[..., xs[i][:, None], acts[j][None, :]],
            'ax': H[..., acts[i][:, None], xs[j][None, :]],
            'aa': H[..., acts[i][:, None], acts[j][None, :]],
        }

    def terminal_cross_hessian(self, x, i, j):
        H = np.asarray(self._terminal_hessian(x), dtype=float)[..., i, :, :]
        xs, _, _ = self._own
        return H[..., xs[i][:, None], xs[j][None, :]]

    def running_rule(self, rule):
        return MIDPOINT if self.affine_gradients else rule

    terminal_rule = running_rule

    def check_symmetric(self, samples=64, seed=0, tolerance=1e-8):
        """
        Compare the cross second derivatives of ``f_i`` and ``f_j`` at
        *samples* points drawn from :attr:`box`.
        """
        rng = np.random.default_rng(seed)
        lo, hi = self.box
        N, d, k = self.n_players, self.state_dim, self.action_dim
        x = rng.uniform(lo, hi, (samples, N * d))
        a = rng.uniform(lo, hi, (samples, N * k))
        for i in range(N):
            for j in range(i + 1, N):
                hij = self.running_cross_hessian(0.0, x, a, i, j)
                hji = self.running_cross_hessian(0.0, x, a, j, i)
                for key, other in (('xx', 'xx'), ('xa', 'ax'), ('aa', 'aa')):
                    diff = hij[key] - np.swapaxes(hji[other], -1, -2)
                    if np.max(np.abs(diff)) > tolerance:
                        raise SymmetryViolation((i, j))
                tij = self.terminal_cross_hessian(x, i, j)
                tji = self.terminal_cross_hessian(x, j, i)
                if np.max(np.abs(tij - np.swapaxes(tji, -1, -2))) > tolerance:
                    raise SymmetryViolation((i, j))
        return True

    def __repr__(self):
        return '<%s N=%d d=%d k=%d>' % (
            type(self).__name__, self.n_players, self.state_dim, self.action_dim)
