#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Reproducible Brownian and Poisson noise for Monte-Carlo rollouts.

Every trajectory draws from its own counter-based stream: a
:class:`numpy.random.Philox` keyed on the seed whose counter starts at
the trajectory index. Within a stream the raw words are consumed in a
fixed order, first the ``P * n`` Brownian increments (step major,
source minor) then the ``P * m`` jump counts. Any subset of
trajectories can therefore be regenerated independently, and the
bundle does not depend on how many threads produced it.

Normals and Poisson counts come from the inverse CDF of the raw
uniforms, never from rejection sampling.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.random import Generator
from numpy.random import Philox
from scipy.special import ndtri
from scipy.stats import poisson

from perfmetrics import Metric

from . import worker_count
from ._loglevels import TRACE
from .interfaces import DomainError
from .interfaces import ShapeMismatchError

__all__ = [
    'NoiseBundle',
    'sample_noise',
    'regenerate',
    'jump_displacements',
]

_MAX_SEED = 2 ** 64

#: Counter word selecting the increment stream or the initial-state
#: stream of a trajectory.
_INCREMENTS = 0
_INITIAL = 1


def _check_seed(seed):
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < _MAX_SEED:
        raise DomainError("Seeds must be integers in [0, 2**64), not %r" % (seed,))
    return int(seed)


def _stream(seed, trajectory, kind=_INCREMENTS):
    return Philox(key=seed, counter=[0, 0, kind, trajectory])


def _uniforms(bit_generator, count):
    # 53 significant bits, centred in their cell: strictly inside (0, 1).
    raw = bit_generator.random_raw(count) if count else np.zeros(0, dtype=np.uint64)
    return ((raw >> np.uint64(11)).astype(float) + 0.5) / 9007199254740992.0


class NoiseBundle(object):
    """
    The common random numbers of a batch of *M* trajectories.

    .. attribute:: dW

       Brownian increments ``[M, P, n]``, each ``Normal(0, delta)``.

    .. attribute:: dN

       Jump counts ``[M, P, m]``, each ``Poisson(lambda_j * delta)``.

    .. attribute:: initial

       Initial joint states ``[M, N*d]``.
    """

    __slots__ = ('seed', 'grid', 'dW', 'dN', 'initial', 'intensities', 'indices')

    def __init__(self, seed, grid, dW, dN, initial, intensities, indices=None):
        self.seed = seed
        self.grid = grid
        self.dW = dW
        self.dN = dN
        self.initial = initial
        self.intensities = intensities
        if indices is None:
            indices = np.arange(len(dW))
        self.indices = indices
        for array in (dW, dN, initial, indices):
            array.flags.writeable = False

    @property
    def size(self):
        "The number of trajectories M."
        return self.dW.shape[0]

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return (isinstance(other, NoiseBundle)
                and self.seed == other.seed
                and self.grid == other.grid
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.dW, other.dW)
                and np.array_equal(self.dN, other.dN)
                and np.array_equal(self.initial, other.initial))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def take(self, rows):
        """
        Return the bundle restricted to the given rows (positions, not
        trajectory indices).
        """
        rows = np.asarray(rows, dtype=np.int64)
        return NoiseBundle(self.seed, self.grid,
                           self.dW[rows], self.dN[rows], self.initial[rows],
                           self.intensities, self.indices[rows])

    def __repr__(self):
        return '<%s seed=%s M=%d P=%d n=%d m=%d>' % (
            type(self).__name__, self.seed, self.size, self.grid.steps,
            self.dW.shape[2], self.dN.shape[2])


class _TrajectorySampler(object):

    def __init__(self, game, grid, seed):
        self.game = game
        self.grid = grid
        self.seed = seed
        self.n = game.noise_dim
        self.rates = game.intensities * grid.delta
        self.scale = np.sqrt(grid.delta)

    def __call__(self, trajectory):
        P, n = self.grid.steps, self.n
        m = len(self.rates)
        bit_generator = _stream(self.seed, trajectory)
        dW = ndtri(_uniforms(bit_generator, P * n)).reshape(P, n) * self.scale
        u = _uniforms(bit_generator, P * m).reshape(P, m)
        dN = np.zeros((P, m), dtype=np.int64)
        active = self.rates > 0
        if np.any(active):
            dN[:, active] = poisson.ppf(u[:, active], self.rates[active]).astype(np.int64)
        game = self.game
        if game.initial_sampler is None:
            initial = game.initial_states.ravel()
        else:
            generator = Generator(_stream(self.seed, trajectory, _INITIAL))
            initial = np.asarray(game.initial_sampler(generator), dtype=float)
            if initial.shape != (game.n_players, game.state_dim):
                raise ShapeMismatchError(
                    "Initial-state sampler returned shape %s" % (initial.shape,))
            initial = initial.ravel()
        return dW, dN, initial


def _generate(game, grid, seed, indices):
    sampler = _TrajectorySampler(game, grid, seed)
    workers = min(worker_count(), len(indices))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sampler, indices.tolist()))
    else:
        rows = [sampler(i) for i in indices.tolist()]
    dW = np.stack([r[0] for r in rows])
    dN = np.stack([r[1] for r in rows])
    initial = np.stack([r[2] for r in rows])
    if logger.isEnabledFor(TRACE):
        logger.log(TRACE, "Generated noise for %d trajectories with %d workers",
                   len(indices), workers)
    return NoiseBundle(seed, grid, dW, dN, initial, game.intensities, indices)


@Metric('alphapotential.noise', rate=0.1)
def sample_noise(game, grid, M, seed):
    """
    Draw the noise of *M* trajectories of *game* on *grid*.

    The result is a deterministic function of the game's noise and
    jump dimensions, its intensities, the grid, *M* and *seed*.

    :raises DomainError: If *M* is not a positive integer.
    """
    if isinstance(M, bool) or int(M) != M or M < 1:
        raise DomainError("At least one trajectory is required, not %r" % (M,))
    seed = _check_seed(seed)
    return _generate(game, grid, seed, np.arange(int(M), dtype=np.int64))


def regenerate(game, grid, seed, indices):
    """
    Regenerate only the trajectories with the given *indices*; the rows
    are bit-identical to the same rows of the full bundle.

    :param seed: The seed, or the :class:`NoiseBundle` to regenerate from.
    """
    if isinstance(seed, NoiseBundle):
        seed = seed.seed
    seed = _check_seed(seed)
    indices = np.asarray(indices, dtype=np.int64).ravel()
    if not len(indices) or np.any(indices < 0):
        raise DomainError("Trajectory indices must be non-negative and non-empty")
    return _generate(game, grid, seed, indices)


def jump_displacements(game, noise):
    """
    The uncompensated jump part ``sum_j gamma_ij(t_l) dN_j`` of every
    player's increment: ``[M, P, N, d]``.
    """
    gamma = game.jump_blocks(noise.grid)
    return np.einsum('pnij,mpj->mpni', gamma, noise.dN.astype(float))
