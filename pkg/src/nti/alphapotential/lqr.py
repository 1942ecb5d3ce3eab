#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
The discrete-time LQR solution of a deterministic single-player
tracking game, used as an oracle for training.

On the training grid the error ``e = x - z`` follows
``e_{l+1} = e_l + B_l a_l`` with ``B_l = b(t_l) delta`` and the cost is
``sum_l a_l' R a_l + e_P' Q e_P`` with ``R = (c/2) delta I`` and
``Q = c_1 I``. The backward Riccati recursion gives the optimal cost
``e_0' P_0 e_0`` and the feedback gains.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import numpy as np
from scipy import linalg

from .game import CrowdCost
from .interfaces import DomainError

__all__ = [
    'RiccatiSolution',
    'riccati_recursion',
    'TrackingOracle',
    'tracking_oracle',
]


class RiccatiSolution(object):
    """
    .. attribute:: value_matrices

       ``P_0 .. P_P``, ``[P + 1, d, d]``.

    .. attribute:: gains

       ``K_l`` with optimal action ``a_l = -K_l e_l``, ``[P, k, d]``.
    """

    __slots__ = ('value_matrices', 'gains', 'steps_matrices')

    def __init__(self, value_matrices, gains, steps_matrices):
        self.value_matrices = value_matrices
        self.gains = gains
        self.steps_matrices = steps_matrices

    def cost(self, error):
        "The optimal cost from the initial error *error*."
        error = np.asarray(error, dtype=float)
        return float(error @ self.value_matrices[0] @ error)

    def rollout(self, error):
        """
        The optimal actions ``[P, k]`` and errors ``[P + 1, d]`` from
        the initial *error*.
        """
        errors = [np.asarray(error, dtype=float)]
        actions = []
        for K, B in zip(self.gains, self.steps_matrices):
            a = -K @ errors[-1]
            actions.append(a)
            errors.append(errors[-1] + B @ a)
        return np.array(actions), np.array(errors)


def riccati_recursion(steps_matrices, control_weight, terminal_weight):
    """
    Solve the recursion for ``e_{l+1} = e_l + B_l a_l`` with stage cost
    ``a' R a`` and terminal cost ``e' Q e``.

    :param steps_matrices: ``B_l``, ``[P, d, k]``.
    :param control_weight: ``R``, a positive definite ``k x k`` matrix
        or one per step.
    :param terminal_weight: ``Q``, ``d x d``.
    :rtype: RiccatiSolution
    """
    B = np.asarray(steps_matrices, dtype=float)
    P_steps, d, k = B.shape
    R = np.asarray(control_weight, dtype=float)
    if R.ndim == 2:
        R = np.broadcast_to(R, (P_steps, k, k))
    values = np.empty((P_steps + 1, d, d))
    gains = np.empty((P_steps, k, d))
    values[-1] = np.asarray(terminal_weight, dtype=float)
    for step in range(P_steps - 1, -1, -1):
        Bl = B[step]
        nxt = values[step + 1]
        gain = linalg.solve(R[step] + Bl.T @ nxt @ Bl, Bl.T @ nxt, assume_a='pos')
        gains[step] = gain
        current = nxt - nxt @ Bl @ gain
        values[step] = 0.5 * (current + current.T)
    return RiccatiSolution(values, gains, B)


class TrackingOracle(object):
    """
    The optimum of a single-player tracking game on a grid.

    ``potential`` is ``cost - zero_cost``: the potential of a
    single-player game is its objective relative to the zero control.
    """

    __slots__ = ('solution', 'cost', 'zero_cost', 'potential', 'error')

    def __init__(self, solution, error, zero_cost):
        self.solution = solution
        self.error = error
        self.cost = solution.cost(error)
        self.zero_cost = float(zero_cost)
        self.potential = self.cost - self.zero_cost

    def to_dict(self):
        return {'cost': self.cost, 'zero_cost': self.zero_cost, 'potential': self.potential}

    def __repr__(self):
        return '<%s cost=%r potential=%r>' % (type(self).__name__, self.cost, self.potential)


def tracking_oracle(game, grid):
    """
    Solve *game*, a deterministic single-player game with a
    :class:`~.CrowdCost`, on *grid*.

    :rtype: TrackingOracle
    :raises DomainError: If the game is not of that form.
    """
    if game.n_players != 1 or not isinstance(game.cost, CrowdCost):
        raise DomainError("The tracking oracle needs a single player with a crowd cost")
    if not game.is_deterministic:
        raise DomainError("The tracking oracle needs a deterministic game")
    cost = game.cost
    c = float(cost.control_weights[0])
    if c <= 0:
        raise DomainError("The tracking oracle needs a positive control weight")
    d, k = game.state_dim, game.action_dim
    B = game.drift_blocks(grid)[:, 0] * grid.delta
    R = 0.5 * c * grid.delta * np.eye(k)
    Q = float(cost.terminal_weights[0]) * np.eye(d)
    solution = riccati_recursion(B, R, Q)
    error = game.initial_states[0] - cost.targets[0]
    oracle = TrackingOracle(solution, error, error @ Q @ error)
    logger.debug("Riccati oracle for %r: %r", game, oracle)
    return oracle
