#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Small games shared by the tests.
"""

from __future__ import print_function, absolute_import, division

import numpy as np

from ..game import CallbackCost
from ..game import CrowdCost
from ..game import GameSpec
from ..game import TimeGrid
from ..kernels import Quadratic


def crowd_cost(n_players=2, dim=2, kernel=None, interaction=1.0, control_weight=0.1,
               terminal_weight=1.0, targets=None, action_dim=None):
    if targets is None:
        targets = np.linspace(-0.5, 0.5, n_players * dim).reshape(n_players, dim)
    return CrowdCost(control_weight, kernel if kernel is not None else Quadratic(),
                     interaction, terminal_weight, targets, action_dim=action_dim)


def initial_states(n_players, dim, seed=7):
    return np.random.default_rng(seed).uniform(-1, 1, (n_players, dim))


def deterministic_game(n_players=2, dim=2, cost=None, drift=None, **kwargs):
    """
    No Brownian or jump noise, a fixed random start.
    """
    cost = cost if cost is not None else crowd_cost(n_players, dim, **kwargs)
    return GameSpec(n_players, dim, cost.action_dim,
                    drift=np.eye(dim, cost.action_dim) if drift is None else drift,
                    diffusion=np.zeros((dim, 1)),
                    jump_loadings=np.zeros((dim, 0)),
                    intensities=(),
                    initial_states=initial_states(n_players, dim),
                    cost=cost)


def noisy_game(n_players=2, dim=2, sigma=0.2, jump=0.1, intensity=2.0, cost=None, **kwargs):
    """
    One common jump source and one Brownian motion per state coordinate.
    """
    cost = cost if cost is not None else crowd_cost(n_players, dim, **kwargs)
    n = n_players * dim
    diffusion = []
    loadings = []
    for i in range(n_players):
        block = np.zeros((dim, n))
        block[:, i * dim:(i + 1) * dim] = sigma * np.eye(dim)
        diffusion.append(block)
        loadings.append(np.full((dim, 2), jump) * [1.0, i + 1.0])
    return GameSpec(n_players, dim, dim,
                    drift=np.eye(dim),
                    diffusion=diffusion,
                    jump_loadings=loadings,
                    intensities=(intensity, 0.5 * intensity),
                    initial_states=initial_states(n_players, dim),
                    cost=cost)


def callback_from(cost, affine_gradients=False):
    """
    A :class:`CallbackCost` with the same costs as *cost*. Only player
    *i*'s rows of ``f_i``'s Hessian are filled, which is all the
    descriptor reads.
    """
    N, d, k = cost.n_players, cost.state_dim, cost.action_dim
    D = N * d + N * k

    def gradient(t, x, a):
        rows = [np.concatenate(cost.running_value_gradient(t, x, a, i), axis=-1)
                for i in range(N)]
        return np.stack(rows, axis=-2)

    def hessian(t, x, a):
        batch = np.shape(x)[:-1]
        result = np.zeros(batch + (N, D, D))
        for i in range(N):
            xi = slice(i * d, (i + 1) * d)
            ai = slice(N * d + i * k, N * d + (i + 1) * k)
            for j in range(N):
                xj = slice(j * d, (j + 1) * d)
                aj = slice(N * d + j * k, N * d + (j + 1) * k)
                blocks = cost.running_cross_hessian(t, x, a, i, j)
                result[..., i, xi, xj] = blocks['xx']
                result[..., i, xi, aj] = blocks['xa']
                result[..., i, ai, xj] = blocks['ax']
                result[..., i, ai, aj] = blocks['aa']
        return result

    def terminal_gradient(x):
        return np.stack([cost.terminal_value_gradient(x, i) for i in range(N)], axis=-2)

    def terminal_hessian(x):
        batch = np.shape(x)[:-1]
        result = np.zeros(batch + (N, N * d, N * d))
        for i in range(N):
            for j in range(N):
                result[..., i, i * d:(i + 1) * d, j * d:(j + 1) * d] = \
                    cost.terminal_cross_hessian(x, i, j)
        return result

    return CallbackCost(N, d, k,
                        cost.running_value, gradient, hessian,
                        cost.terminal_value, terminal_gradient, terminal_hessian,
                        affine_gradients=affine_gradients)


def grid(steps=10, horizon=1.0):
    return TimeGrid(horizon, steps)
