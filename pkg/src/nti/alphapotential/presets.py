#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Named experiments.

The crowd presets share four players moving in the plane, starting at
the origin on ``[0, 1]`` with 50 steps. Noise is an eight-dimensional
Brownian motion with player *i* (zero-based) loading ``0.1 i / N`` on
its own two coordinates, and ten jump sources: two common sources
with intensity 0.25 hitting every player, then two sources per player
with intensity 0.3 for the first player and 0.2 for the rest.

``lqr-oracle`` is a deterministic single-player tracking game whose
optimum is known in closed form; see :mod:`.lqr`.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import numpy as np

from .config import Experiment
from .game import CrowdCost
from .game import GameSpec
from .interfaces import UnknownPresetError
from .kernels import Gaussian
from .kernels import Quadratic
from .loop import TrainConfig

__all__ = [
    'get_preset',
    'preset_names',
    'crowd_game',
]

PLAYERS = 4
DIM = 2
PRESET_SEED = 2025

COMMON_INTENSITY = 0.25
FIRST_INTENSITY = 0.3
IDIOSYNCRATIC_INTENSITY = 0.2

#: The flocking targets, one row per player.
FLOCKING_TARGETS = ((0.25, 0.0), (0.0, 0.5), (-0.5, 0.0), (0.0, -1.0))


def _train(**kwargs):
    settings = dict(iterations=500, batch=500, eval_batch=500, horizon=1.0, steps=50,
                    learning_rate=1e-3, seed=PRESET_SEED)
    settings.update(kwargs)
    return TrainConfig(**settings)


def _diffusion(n_players, dim, scale):
    result = []
    for i in range(n_players):
        sigma = np.zeros((dim, n_players * dim))
        sigma[:, i * dim:(i + 1) * dim] = scale * i / n_players * np.eye(dim)
        result.append(sigma)
    return result


def _jumps(n_players, dim, common, own):
    """
    Loadings ``d x (2 + 2N)``: each common source moves along one axis;
    player *i*'s own sources are columns ``2 + 2i`` and ``3 + 2i``.
    """
    intensities = np.full(2 + 2 * n_players, IDIOSYNCRATIC_INTENSITY)
    intensities[:2] = COMMON_INTENSITY
    intensities[2:4] = FIRST_INTENSITY
    loadings = []
    for i in range(n_players):
        gamma = np.zeros((dim, 2 + 2 * n_players))
        gamma[:, :2] = common * np.eye(dim)
        gamma[:, 2 + 2 * i:4 + 2 * i] = own * np.eye(dim)
        loadings.append(gamma)
    return intensities, loadings


def crowd_game(kernel, interaction, terminal_weight, targets,
               sigma=0.1, own_jump=0.1, common_jump=0.0, control_weight=0.1):
    """
    The four-player planar game with the shared noise structure.
    """
    cost = CrowdCost(control_weight, kernel, interaction, terminal_weight, targets)
    intensities, loadings = _jumps(PLAYERS, DIM, common_jump, own_jump)
    return GameSpec(PLAYERS, DIM, DIM,
                    drift=np.eye(DIM),
                    diffusion=_diffusion(PLAYERS, DIM, sigma),
                    jump_loadings=loadings,
                    intensities=intensities,
                    initial_states=np.zeros((PLAYERS, DIM)),
                    cost=cost,
                    control_cap=1.0,
                    noise_dim=PLAYERS * DIM)


def _aversion():
    game = crowd_game(Gaussian(100.0, 100.0), 1.0, 1.0,
                      np.tile([0.5, 0.5], (PLAYERS, 1)))
    return Experiment('aversion', game, _train())


def _flocking_uniform():
    game = crowd_game(Quadratic(), 1.0, 40.0, FLOCKING_TARGETS)
    return Experiment('flocking-uniform', game, _train())


#: Zero-based groups: the second and third players flock together, as
#: do the first and fourth.
FLOCKING_GROUPS = ((1, 2), (0, 3))


def _flocking_groups():
    q = np.zeros((PLAYERS, PLAYERS))
    for group in FLOCKING_GROUPS:
        for i in group:
            for j in group:
                if i != j:
                    q[i, j] = 1.0
    game = crowd_game(Quadratic(), q, 40.0, FLOCKING_TARGETS)
    return Experiment('flocking-groups', game, _train(), FLOCKING_GROUPS)


def _flocking_common_jump():
    game = crowd_game(Quadratic(), 1.0, 40.0, FLOCKING_TARGETS,
                      sigma=0.0, own_jump=0.0, common_jump=0.1)
    return Experiment('flocking-common-jump', game, _train())


def _lqr_oracle():
    cost = CrowdCost([0.1], Quadratic(), [[0.0]], [1.0], [[0.5, 0.5]])
    game = GameSpec(1, DIM, DIM,
                    drift=np.eye(DIM),
                    diffusion=np.zeros((DIM, 1)),
                    jump_loadings=np.zeros((DIM, 0)),
                    intensities=(),
                    initial_states=np.zeros((1, DIM)),
                    cost=cost,
                    control_cap=1.0)
    train = _train(batch=1, eval_batch=1, validation_batch=1, learning_rate=1e-2)
    return Experiment('lqr-oracle', game, train)


_PRESETS = {
    'aversion': _aversion,
    'flocking-uniform': _flocking_uniform,
    'flocking-groups': _flocking_groups,
    'flocking-common-jump': _flocking_common_jump,
    'lqr-oracle': _lqr_oracle,
}


def preset_names():
    return sorted(_PRESETS)


def get_preset(name):
    """
    A fresh :class:`~.Experiment` for the preset *name*.

    :raises UnknownPresetError: If there is no such preset.
    """
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise UnknownPresetError(name)
    return factory()
