#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
The alpha-potential of a distributed game and its estimators.

For a profile ``u`` with states ``X`` and sensitivities ``Y`` the
potential is ``E[int F(t, X, Y, a) dt + G(X_T, Y_T)]`` with

.. math::

   F(t, x, y, a) = \\sum_i \\int_0^1 [y_i; a_i]^T
                   [\\partial_{x_i} f_i; \\partial_{a_i} f_i](t, x - (1-r) y, r a) dr

   G(x, y) = \\sum_i \\int_0^1 y_i^T \\partial_{x_i} g_i(x - (1-r) y) dr

The time integral is the same left Riemann sum the objectives use, so
the potential and the objectives live on one grid. The r-integrals use
a :class:`~.QuadratureRule`; costs whose own gradients are affine
substitute the exact midpoint rule.

When the cross derivatives of the costs are symmetric the game has the
exact potential with ``F_bar(t, x, a) = sum_i int [x_i; a_i] . grad_i f_i(t, rx, ra) dr``
and ``G_bar(x) = sum_i int x_i . grad_i g_i(rx) dr``, see
:func:`symmetric_potential`.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import numpy as np

from perfmetrics import Metric

from .autodiff import Tape
from .autodiff import backward
from .interfaces import NonFiniteActionError
from .policy import policy_forward
from .quadrature import gauss_legendre
from .simulation import PathBatch
from .simulation import control_increment
from .simulation import noise_forcing

__all__ = [
    'PotentialValue',
    'F_integrand',
    'G_terminal',
    'F_bar_integrand',
    'G_bar_terminal',
    'empirical_potential',
    'potential_samples',
    'symmetric_potential',
    'Objective',
    'potential_objective',
]


class PotentialValue(object):
    """
    A Monte-Carlo estimate of the potential.

    ``value`` is always ``running + terminal``.
    """

    __slots__ = ('value', 'running', 'terminal', 'stderr', 'samples')

    def __init__(self, running, terminal, stderr, samples):
        self.running = float(running)
        self.terminal = float(terminal)
        self.value = self.running + self.terminal
        self.stderr = float(stderr)
        self.samples = int(samples)

    @classmethod
    def from_samples(cls, running, terminal):
        """
        Estimate from the per-trajectory running and terminal parts.
        """
        running = np.asarray(running, dtype=float)
        terminal = np.asarray(terminal, dtype=float)
        M = len(running)
        stderr = 0.0
        if M > 1:
            stderr = np.std(running + terminal, ddof=1) / np.sqrt(M)
        return cls(np.mean(running), np.mean(terminal), stderr, M)

    def to_dict(self):
        return {
            'potential': self.value,
            'running': self.running,
            'terminal': self.terminal,
            'stderr': self.stderr,
        }

    def __repr__(self):
        return '<%s %r +/- %r>' % (type(self).__name__, self.value, self.stderr)


def _rule(rule):
    return gauss_legendre() if rule is None else rule


def _stacked(rule, ndim):
    """
    The nodes of *rule* on a new leading axis, to broadcast against
    joint vectors of *ndim* dimensions, and the weights.
    """
    return rule.nodes.reshape((-1,) + (1,) * ndim), rule.weights


def _contract(weights, values):
    "Sum the leading node axis of *values* against *weights*."
    return np.einsum('r,r...->...', weights, values)


def F_integrand(game, t, x, y, a, rule=None):
    """
    The running integrand ``F``, batched over the leading axes of the
    joint vectors. Every node of the r-rule is evaluated in one call of
    the cost.
    """
    cost = game.cost
    x, y, a = (np.asarray(v, dtype=float) for v in (x, y, a))
    r, w = _stacked(cost.running_rule(_rule(rule)), x.ndim)
    gx, ga = cost.running_gradient(t, x - (1.0 - r) * y, r * a)
    return _contract(w, np.sum(y * gx, axis=-1) + np.sum(a * ga, axis=-1))


def _F_vjp(game, t, x, y, a, rule, g):
    cost = game.cost
    r, w = _stacked(cost.running_rule(rule), x.ndim)
    u, v = x - (1.0 - r) * y, r * a
    gx, ga = cost.running_gradient(t, u, v)
    xb, ab = cost.running_gradient_vjp(t, u, v, np.broadcast_to(y, u.shape),
                                       np.broadcast_to(a, v.shape))
    x_bar = _contract(w, xb)
    y_bar = _contract(w, gx - (1.0 - r) * xb)
    a_bar = _contract(w, ga + r * ab)
    g = np.asarray(g)[..., None]
    return g * x_bar, g * y_bar, g * a_bar


def G_terminal(game, x, y, rule=None):
    """
    The terminal integrand ``G``.
    """
    cost = game.cost
    x, y = (np.asarray(v, dtype=float) for v in (x, y))
    r, w = _stacked(cost.terminal_rule(_rule(rule)), x.ndim)
    return _contract(w, np.sum(y * cost.terminal_gradient(x - (1.0 - r) * y), axis=-1))


def _G_vjp(game, x, y, rule, g):
    cost = game.cost
    r, w = _stacked(cost.terminal_rule(rule), x.ndim)
    u = x - (1.0 - r) * y
    xb = cost.terminal_gradient_vjp(u, np.broadcast_to(y, u.shape))
    x_bar = _contract(w, xb)
    y_bar = _contract(w, cost.terminal_gradient(u) - (1.0 - r) * xb)
    g = np.asarray(g)[..., None]
    return g * x_bar, g * y_bar


def F_bar_integrand(game, t, x, a, rule=None):
    "The running integrand of the exact potential of a symmetric game."
    cost = game.cost
    x, a = (np.asarray(v, dtype=float) for v in (x, a))
    r, w = _stacked(cost.running_rule(_rule(rule)), x.ndim)
    gx, ga = cost.running_gradient(t, r * x, r * a)
    return _contract(w, np.sum(x * gx, axis=-1) + np.sum(a * ga, axis=-1))


def G_bar_terminal(game, x, rule=None):
    "The terminal integrand of the exact potential of a symmetric game."
    cost = game.cost
    x = np.asarray(x, dtype=float)
    r, w = _stacked(cost.terminal_rule(_rule(rule)), x.ndim)
    return _contract(w, np.sum(x * cost.terminal_gradient(r * x), axis=-1))


def _riemann(paths, integrand):
    running = 0.0
    delta = paths.grid.delta
    for step, t in enumerate(paths.grid.left_nodes.tolist()):
        running = running + integrand(t, step) * delta
    return running


def potential_samples(paths, game, rule=None, symmetric=False):
    """
    The per-trajectory running and terminal parts of the potential on
    *paths*, two arrays of length ``M``. With *symmetric*, the parts of
    the exact potential of a symmetric game (not checked here).
    """
    rule = _rule(rule)
    X, Y, A = paths.X, paths.Y, paths.actions
    if symmetric:
        running = _riemann(paths, lambda t, step: F_bar_integrand(
            game, t, np.ascontiguousarray(X[:, step]), np.ascontiguousarray(A[:, step]), rule))
        terminal = G_bar_terminal(game, np.ascontiguousarray(X[:, -1]), rule)
    else:
        running = _riemann(paths, lambda t, step: F_integrand(
            game, t,
            np.ascontiguousarray(X[:, step]), np.ascontiguousarray(Y[:, step]),
            np.ascontiguousarray(A[:, step]), rule))
        terminal = G_terminal(game, np.ascontiguousarray(X[:, -1]),
                              np.ascontiguousarray(Y[:, -1]), rule)
    return running * np.ones(paths.size), terminal * np.ones(paths.size)


@Metric('alphapotential.potential', rate=0.1)
def empirical_potential(paths, game, rule=None):
    """
    The Monte-Carlo potential of the rollouts in *paths*.

    :rtype: PotentialValue
    """
    return PotentialValue.from_samples(*potential_samples(paths, game, rule))


def symmetric_potential(paths, game, rule=None):
    """
    The exact potential of a game with symmetric cross derivatives,
    estimated on *paths*.

    :raises SymmetryViolation: If the cost is not symmetric.
    """
    game.cost.check_symmetric()
    return PotentialValue.from_samples(*potential_samples(paths, game, rule, symmetric=True))


class Objective(object):
    """
    The recorded computation of the empirical potential of a policy.

    .. attribute:: output

       The scalar potential variable on :attr:`tape`.
    """

    __slots__ = ('tape', 'output', 'potential', 'paths')

    def __init__(self, tape, output, potential, paths):
        self.tape = tape
        self.output = output
        self.potential = potential
        self.paths = paths

    def gradient(self):
        "The gradient with respect to the flat parameter vector."
        return np.concatenate([g.ravel() for g in backward(self.tape, self.output)])


@Metric('alphapotential.potential', rate=0.1)
def potential_objective(params, game, noise, rule=None, truncate=False):
    """
    Roll out the policy *params* on *noise* while recording on a fresh
    tape, and evaluate the empirical potential.

    The recorded arithmetic is the same as :func:`~.simulate` followed
    by :func:`empirical_potential`, so both give the same value.

    :keyword bool truncate: Feed the policy the state values as
        constants, cutting the gradient path through the state
        recursion.
    :raises NonFiniteActionError: If the policy produces a non-finite
        action.
    :rtype: Objective
    """
    # pylint:disable=too-many-locals
    rule = _rule(rule)
    grid = noise.grid
    M, P = noise.size, grid.steps
    N, d, k = game.n_players, game.state_dim, game.action_dim
    delta = grid.delta
    blocks = game.drift_blocks(grid)
    forcing = noise_forcing(game, noise)

    tape = Tape()
    bound = params.bind(tape)
    X = tape.constant(np.array(noise.initial))
    Y = tape.constant(np.zeros((M, game.state_size)))
    xs, ys, actions = [X.value], [Y.value], []
    running = None
    for step, t in enumerate(grid.left_nodes.tolist()):
        if truncate:
            a = policy_forward(bound, t, tape.constant(X.value), tape.constant(Y.value), tape)
        else:
            a = policy_forward(bound, t, X, Y, tape)
        if not np.all(np.isfinite(a.value)):
            rows = np.flatnonzero(~np.all(np.isfinite(a.value), axis=-1))
            raise NonFiniteActionError(step, int(rows[0]))
        actions.append(a.value)

        F = tape.custom(
            [X, Y, a],
            lambda x, y, v, t=t: F_integrand(game, t, x, y, v, rule),
            lambda g, x, y, v, t=t: _F_vjp(game, t, x, y, v, rule, g),
            name='F')
        term = tape.scale(F, delta)
        running = term if running is None else tape.add(running, term)

        B = blocks[step]
        move = tape.custom(
            [a],
            lambda v, B=B: control_increment(B, v, N, k, delta),
            lambda g, v, B=B: (np.einsum('nij,mni->mnj', B, g.reshape(M, N, d))
                               .reshape(M, N * k) * delta,),
            name='drift')
        X = tape.add(tape.add(X, move), tape.constant(forcing[:, step]))
        Y = tape.add(Y, move)
        xs.append(X.value)
        ys.append(Y.value)

    G = tape.custom(
        [X, Y],
        lambda x, y: G_terminal(game, x, y, rule),
        lambda g, x, y: _G_vjp(game, x, y, rule, g),
        name='G')
    output = tape.add(tape.mean(running), tape.mean(G))
    potential = PotentialValue.from_samples(running.value, G.value)
    paths = PathBatch(np.stack(xs, axis=1), np.stack(ys, axis=1),
                      np.stack(actions, axis=1), grid, noise)
    return Objective(tape, output, potential, paths)
