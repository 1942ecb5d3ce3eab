#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
The Euler-Maruyama scheme for the joint state and sensitivity.

Given actions ``a_l`` at the left nodes,

.. math::

   X_{l+1} = X_l + b(t_l) a_l \\Delta + \\sigma(t_l) \\Delta W_l
             + \\sum_j \\gamma_j(t_l) (\\Delta N_{j,l} - \\lambda_j \\Delta)

   Y_{l+1} = Y_l + b(t_l) a_l \\Delta

with ``Y_0 = 0``. All jumps of a step land at its right node, loaded
at its left node. Because the scheme is affine in the actions, scaling
the actions by ``r`` gives exactly ``X - (1 - r) Y``.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import csv

import numpy as np

from perfmetrics import Metric

from ._loglevels import TRACE
from .interfaces import IActionSource
from .interfaces import NonFiniteActionError
from .interfaces import ShapeMismatchError
from .game import TimeGrid

__all__ = [
    'PathBatch',
    'noise_forcing',
    'control_increment',
    'simulate',
    'simulate_open_loop',
    'player_costs',
    'player_objectives',
    'control_norms',
]


class PathBatch(object):
    """
    *M* simulated joint trajectories.

    .. attribute:: X

       States ``[M, P+1, N*d]``.

    .. attribute:: Y

       Sensitivities ``[M, P+1, N*d]``; ``Y[:, 0] == 0``.

    .. attribute:: actions

       Actions ``[M, P, N*k]`` taken at the left nodes.
    """

    __slots__ = ('X', 'Y', 'actions', 'grid', 'noise')

    def __init__(self, X, Y, actions, grid, noise=None):
        self.X = X
        self.Y = Y
        self.actions = actions
        self.grid = grid
        self.noise = noise

    @property
    def size(self):
        return self.X.shape[0]

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return (isinstance(other, PathBatch)
                and self.grid == other.grid
                and np.array_equal(self.X, other.X)
                and np.array_equal(self.Y, other.Y)
                and np.array_equal(self.actions, other.actions))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def header(self):
        "The CSV column names."
        sd = self.X.shape[2]
        sk = self.actions.shape[2]
        return (['trajectory', 'step', 't']
                + ['x%d' % c for c in range(sd)]
                + ['y%d' % c for c in range(sd)]
                + ['a%d' % c for c in range(sk)])

    def to_csv(self, stream):
        """
        Write one row per trajectory and grid node to the text *stream*.
        The actions of the final node are left empty.
        """
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(self.header())
        nodes = self.grid.nodes
        blank = [''] * self.actions.shape[2]
        for m in range(self.size):
            for step, t in enumerate(nodes):
                actions = (self.actions[m, step].tolist()
                           if step < self.grid.steps else blank)
                writer.writerow([m, step, repr(float(t))]
                                + [repr(v) for v in self.X[m, step].tolist()]
                                + [repr(v) for v in self.Y[m, step].tolist()]
                                + [repr(v) if v != '' else v for v in actions])

    def save(self, path):
        """
        Write a compact binary dump that :meth:`load` reads back.
        """
        np.savez(path, X=self.X, Y=self.Y, actions=self.actions,
                 horizon=self.grid.horizon, steps=self.grid.steps)

    @classmethod
    def load(cls, path):
        with np.load(path) as data:
            grid = TimeGrid(float(data['horizon']), int(data['steps']))
            return cls(data['X'], data['Y'], data['actions'], grid)

    def __repr__(self):
        return '<%s M=%d P=%d>' % (type(self).__name__, self.size, self.grid.steps)


def noise_forcing(game, noise):
    """
    The control-independent part of every increment:
    ``sigma dW + gamma (dN - lambda delta)``, ``[M, P, N*d]``.
    """
    grid = noise.grid
    M, P = noise.size, grid.steps
    sigma = game.diffusion_blocks(grid)
    forcing = np.einsum('pnij,mpj->mpni', sigma, noise.dW)
    if game.jump_sources:
        gamma = game.jump_blocks(grid)
        compensated = noise.dN.astype(float) - game.intensities * grid.delta
        forcing = forcing + np.einsum('pnij,mpj->mpni', gamma, compensated)
    return forcing.reshape(M, P, game.state_size)


def control_increment(blocks, actions, n_players, action_dim, delta):
    """
    ``b_i(t_l) a_i delta`` for every player, ``[M, N*d]``, given the
    drift blocks ``[N, d, k]`` of one step.
    """
    A = actions.reshape(actions.shape[0], n_players, action_dim)
    # Player i's drift only reads player i's actions.
    move = np.einsum('nij,mnj->mni', blocks, A).reshape(actions.shape[0], -1)
    return move * delta


def _as_source(policy):
    if IActionSource.providedBy(policy):
        return policy.actions
    if callable(policy):
        return policy
    raise TypeError("Not an action source: %r" % (policy,))


def _check_noise(game, noise):
    if noise.dW.shape[2] != game.noise_dim or noise.dN.shape[2] != game.jump_sources:
        raise ShapeMismatchError("Noise dimensions %s do not match the game"
                                 % ((noise.dW.shape[2], noise.dN.shape[2]),))
    if noise.initial.shape[1] != game.state_size:
        raise ShapeMismatchError("Initial states have %d coordinates, expected %d"
                                 % (noise.initial.shape[1], game.state_size))


def _first_bad(actions):
    rows = np.flatnonzero(~np.all(np.isfinite(actions), axis=-1))
    return int(rows[0])


@Metric('alphapotential.simulate', rate=0.1)
def simulate(game, policy, noise):
    """
    Roll out the feedback *policy* on *noise*.

    :param policy: An :class:`~.IActionSource` or a callable with the
        same signature, given ``(t, X, Y)`` batched over trajectories.
    :raises NonFiniteActionError: Locating the first non-finite action.
    """
    _check_noise(game, noise)
    source = _as_source(policy)
    grid = noise.grid
    M, P = noise.size, grid.steps
    N, k, delta = game.n_players, game.action_dim, grid.delta
    blocks = game.drift_blocks(grid)
    forcing = noise_forcing(game, noise)

    X = np.empty((M, P + 1, game.state_size))
    Y = np.zeros((M, P + 1, game.state_size))
    actions = np.empty((M, P, game.action_size))
    X[:, 0] = noise.initial
    for step, t in enumerate(grid.left_nodes.tolist()):
        a = np.asarray(source(t, X[:, step], Y[:, step]), dtype=float)
        if a.shape != (M, game.action_size):
            raise ShapeMismatchError("Policy returned actions of shape %s, expected %s"
                                     % (a.shape, (M, game.action_size)))
        if not np.all(np.isfinite(a)):
            raise NonFiniteActionError(step, _first_bad(a))
        actions[:, step] = a
        move = control_increment(blocks[step], a, N, k, delta)
        X[:, step + 1] = X[:, step] + move + forcing[:, step]
        Y[:, step + 1] = Y[:, step] + move
        if logger.isEnabledFor(TRACE):
            logger.log(TRACE, "Step %d of %d: mean |a| %s", step, P,
                       np.mean(np.abs(a)))
    return PathBatch(X, Y, actions, grid, noise)


def simulate_open_loop(game, controls, noise):
    """
    Like :func:`simulate`, with the actions ``[M, P, N*k]`` supplied.
    """
    _check_noise(game, noise)
    grid = noise.grid
    controls = np.asarray(controls, dtype=float)
    M, P = noise.size, grid.steps
    if controls.shape != (M, P, game.action_size):
        raise ShapeMismatchError("Controls have shape %s, expected %s"
                                 % (controls.shape, (M, P, game.action_size)))
    if not np.all(np.isfinite(controls)):
        bad = np.argwhere(~np.isfinite(controls))[0]
        raise NonFiniteActionError(int(bad[1]), int(bad[0]))
    blocks = game.drift_blocks(grid)
    forcing = noise_forcing(game, noise)
    X = np.empty((M, P + 1, game.state_size))
    Y = np.zeros((M, P + 1, game.state_size))
    X[:, 0] = noise.initial
    for step in range(P):
        move = control_increment(blocks[step], np.ascontiguousarray(controls[:, step]),
                                 game.n_players, game.action_dim, grid.delta)
        X[:, step + 1] = X[:, step] + move + forcing[:, step]
        Y[:, step + 1] = Y[:, step] + move
    return PathBatch(X, Y, controls.copy(), grid, noise)


def player_costs(paths, game):
    """
    Every player's realized cost on every trajectory, ``[M, N]``: the
    left Riemann sum of the running costs plus the terminal cost.
    """
    grid = paths.grid
    cost = game.cost
    running = np.zeros((paths.size, game.n_players))
    for step, t in enumerate(grid.left_nodes.tolist()):
        running += cost.running_value(t, paths.X[:, step], paths.actions[:, step])
    return running * grid.delta + cost.terminal_value(paths.X[:, -1])


def player_objectives(paths, game):
    "The Monte-Carlo estimates of ``J_i``, ``[N]``."
    return np.mean(player_costs(paths, game), axis=0)


def control_norms(actions, grid, n_players, action_dim):
    """
    Each player's empirical ``H^2`` norm,
    ``sqrt(E[sum_l |a_{i,l}|^2 delta])``.
    """
    actions = np.asarray(actions, dtype=float)
    A = actions.reshape(actions.shape[:2] + (n_players, action_dim))
    energy = np.sum(A * A, axis=(1, 3)) * grid.delta
    return np.sqrt(np.mean(energy, axis=0))
