#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Explicit upper bounds on the alpha of a distributed game.

For a general game the bound is

.. math::

   \\alpha = \\frac12 \\max_i \\sum_{j \\ne i} U_i U_j \\big[
       T B_i B_j \\|\\partial^2_{x_i x_j} \\Delta f\\|
       + \\sqrt{T} B_i \\|\\partial^2_{x_i a_j} \\Delta f\\|
       + \\sqrt{T} B_j \\|\\partial^2_{a_i x_j} \\Delta f\\|
       + \\|\\partial^2_{a_i a_j} \\Delta f\\|
       + B_i B_j \\|\\partial^2_{x_i x_j} \\Delta g\\| \\big]

with ``Delta f = f_i - f_j`` and ``Delta g = g_i - g_j``. For crowd
games only the kernel term survives and the bound is
``T B^2 U^2 kappa zeta_N / 2``.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import json
import math

import numpy as np

from .game import CrowdCost
from .interfaces import DomainError
from .kernels import kernel_curvature

__all__ = [
    'DerivativeBounds',
    'AlphaReport',
    'sample_derivative_bounds',
    'derivative_bounds',
    'alpha_bound_general',
    'crowd_alpha',
    'zeta_exact',
    'game_alpha',
]

#: The points drawn by :func:`sample_derivative_bounds`.
DEFAULT_DERIVATIVE_SAMPLES = 10 ** 4

#: The five terms of the general bound, in order.
TERMS = ('running_xx', 'running_xa', 'running_ax', 'running_aa', 'terminal_xx')


class DerivativeBounds(object):
    """
    Sup-norms of the mixed second derivatives of the cost differences,
    one ``N x N`` table per term of :data:`TERMS`; entry ``[i, j]``
    belongs to the ordered pair ``(i, j)`` and the diagonal is zero.

    ``method`` is ``'closed form'`` or ``'sampled sup'``; a sampled
    sup records its sample count in ``samples``.
    """

    def __init__(self, running_xx, running_xa, running_ax, running_aa, terminal_xx,
                 method='closed form', samples=None):
        tables = []
        N = np.shape(running_xx)[0]
        for name, table in zip(TERMS, (running_xx, running_xa, running_ax,
                                       running_aa, terminal_xx)):
            table = np.array(table, dtype=float)
            if table.shape != (N, N):
                raise DomainError("%s must be a %d x %d table" % (name, N, N))
            if not np.all(np.isfinite(table)) or np.any(table < 0):
                raise DomainError("%s must be finite and non-negative" % name)
            np.fill_diagonal(table, 0.0)
            table.flags.writeable = False
            tables.append(table)
        (self.running_xx, self.running_xa, self.running_ax,
         self.running_aa, self.terminal_xx) = tables
        self.n_players = N
        self.method = method
        self.samples = samples

    @classmethod
    def zeros(cls, n_players):
        zero = np.zeros((n_players, n_players))
        return cls(zero, zero, zero, zero, zero)

    @classmethod
    def from_crowd_cost(cls, cost):
        """
        The closed form for a :class:`~.CrowdCost`: only
        ``||d2_{x_i x_j} Delta f|| = kappa |q_ij - q_ji| / (N - 1)``
        is non-zero.
        """
        N = cost.n_players
        if N == 1:
            return cls.zeros(1)
        q = cost.interaction
        xx = kernel_curvature(cost.kernel) * np.abs(q - q.T) / (N - 1)
        zero = np.zeros((N, N))
        return cls(xx, zero, zero, zero, zero)

    def tables(self):
        return [getattr(self, name) for name in TERMS]

    def to_dict(self):
        result = {name: getattr(self, name).tolist() for name in TERMS}
        result['method'] = self.method
        result['samples'] = self.samples
        return result

    def __repr__(self):
        return '<%s N=%d %s>' % (type(self).__name__, self.n_players, self.method)


def _spectral(matrices):
    matrices = np.asarray(matrices, dtype=float)
    if matrices.shape[-1] == 0 or matrices.shape[-2] == 0:
        return 0.0
    return float(np.max(np.linalg.norm(matrices, ord=2, axis=(-2, -1))))


def sample_derivative_bounds(cost, samples=DEFAULT_DERIVATIVE_SAMPLES, seed=0,
                             box=None, horizon=1.0):
    """
    Estimate :class:`DerivativeBounds` for any cost descriptor by the
    largest spectral norm over *samples* points ``(t, x, a)`` drawn
    uniformly from ``[0, horizon]`` and the coordinate *box* (by
    default the cost's ``box`` attribute, else ``(-1, 1)``). The
    running Hessian is called once with ``t`` of shape ``(samples,)``.

    The result is a sampled sup, not a certified bound.
    """
    lo, hi = box if box is not None else getattr(cost, 'box', (-1.0, 1.0))
    rng = np.random.default_rng(seed)
    N, d, k = cost.n_players, cost.state_dim, cost.action_dim
    tables = {name: np.zeros((N, N)) for name in TERMS}
    if N > 1:
        x = rng.uniform(lo, hi, (samples, N * d))
        a = rng.uniform(lo, hi, (samples, N * k))
        # One time per point, batched like x and a.
        t = rng.uniform(0.0, horizon, samples)
        running = {}
        terminal = {}
        for i in range(N):
            for j in range(N):
                if i != j:
                    running[i, j] = cost.running_cross_hessian(t, x, a, i, j)
                    terminal[i, j] = cost.terminal_cross_hessian(x, i, j)
        for (i, j), mine in running.items():
            theirs = running[j, i]
            tables['running_xx'][i, j] = _spectral(mine['xx'] - np.swapaxes(theirs['xx'], -1, -2))
            tables['running_xa'][i, j] = _spectral(mine['xa'] - np.swapaxes(theirs['ax'], -1, -2))
            tables['running_ax'][i, j] = _spectral(mine['ax'] - np.swapaxes(theirs['xa'], -1, -2))
            tables['running_aa'][i, j] = _spectral(mine['aa'] - np.swapaxes(theirs['aa'], -1, -2))
            tables['terminal_xx'][i, j] = _spectral(
                terminal[i, j] - np.swapaxes(terminal[j, i], -1, -2))
    logger.debug("Sampled derivative bounds of %r at %d points", cost, samples)
    return DerivativeBounds(*(tables[name] for name in TERMS),
                            method='sampled sup', samples=int(samples))


def derivative_bounds(cost, **kwargs):
    """
    Closed-form bounds for crowd costs, sampled bounds otherwise.
    """
    if isinstance(cost, CrowdCost):
        return DerivativeBounds.from_crowd_cost(cost)
    return sample_derivative_bounds(cost, **kwargs)


class AlphaReport(object):
    """
    An alpha upper bound and how it was assembled.

    For the general bound ``terms`` maps each name of :data:`TERMS` to
    its contribution at the maximizing ``player`` (the factor 1/2
    included), and ``bound`` is their sum. For the crowd bound
    ``terms`` holds the factors ``half``, ``horizon``, ``B_squared``,
    ``U_squared``, ``kappa`` and ``zeta`` whose product is ``bound``.
    """

    def __init__(self, kind, bound, terms, inputs, player=None):
        bound = float(bound)
        if not bound >= 0:
            raise DomainError("An alpha bound cannot be %r" % (bound,))
        self.kind = kind
        self.bound = bound
        self.terms = dict(terms)
        self.inputs = dict(inputs)
        self.player = player
        self.control_norms = None
        self.exceeds_cap = False

    def check_controls(self, norms, cap):
        """
        Record the empirical control *norms* and flag the report if any
        exceeds the *cap* the bound assumed.
        """
        norms = [float(n) for n in np.ravel(norms)]
        self.control_norms = norms
        self.exceeds_cap = any(n > cap for n in norms)
        if self.exceeds_cap:
            logger.warning("Control norms %s exceed the cap U=%s; the alpha bound "
                           "does not cover these controls", norms, cap)
        return self

    def to_dict(self):
        return {
            'kind': self.kind,
            'bound': self.bound,
            'terms': self.terms,
            'inputs': self.inputs,
            'player': self.player,
            'control_norms': self.control_norms,
            'exceeds_cap': self.exceeds_cap,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def __repr__(self):
        return '<%s %s bound=%r>' % (type(self).__name__, self.kind, self.bound)


def _non_negative(name, values, n_players):
    values = np.array(values, dtype=float)
    if values.ndim == 0:
        values = np.full(n_players, float(values))
    if values.shape != (n_players,):
        raise DomainError("%s must have one entry per player" % name)
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise DomainError("%s must be finite and non-negative" % name)
    return values


def alpha_bound_general(bounds, b_norms, u_norms, horizon):
    """
    The general alpha bound from derivative *bounds*, the drift norms
    ``B_i``, the control caps ``U_i`` and the horizon ``T``.

    :rtype: AlphaReport
    :raises DomainError: If any input is negative or not finite.
    """
    N = bounds.n_players
    B = _non_negative('b_norms', b_norms, N)
    U = _non_negative('u_norms', u_norms, N)
    T = float(horizon)
    if not np.isfinite(T) or T < 0:
        raise DomainError("The horizon must be finite and non-negative")
    root_T = math.sqrt(T)
    UU = np.outer(U, U)
    BB = np.outer(B, B)
    parts = {
        'running_xx': 0.5 * UU * T * BB * bounds.running_xx,
        'running_xa': 0.5 * UU * root_T * B[:, None] * bounds.running_xa,
        'running_ax': 0.5 * UU * root_T * B[None, :] * bounds.running_ax,
        'running_aa': 0.5 * UU * bounds.running_aa,
        'terminal_xx': 0.5 * UU * BB * bounds.terminal_xx,
    }
    rows = sum(parts[name] for name in TERMS).sum(axis=1)
    player = int(np.argmax(rows)) if N else 0
    terms = {name: math.fsum(parts[name][player]) for name in TERMS}
    return AlphaReport(
        'general', math.fsum(terms[name] for name in TERMS), terms,
        {
            'horizon': T,
            'b_norms': B.tolist(),
            'u_norms': U.tolist(),
            'method': bounds.method,
            'samples': bounds.samples,
        },
        player=player)


def zeta_exact(q):
    """
    ``max_i sum_{j != i} |q_ji - q_ij| / (N - 1)``.

    :raises DomainError: If *q* is not square with a zero diagonal.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise DomainError("The interaction table must be square")
    if np.any(np.diag(q) != 0):
        raise DomainError("The interaction table must have a zero diagonal")
    N = q.shape[0]
    if N < 2:
        return 0.0
    return float(np.max(np.sum(np.abs(q.T - q), axis=1)) / (N - 1))


def crowd_alpha(cost, B, U, horizon):
    """
    The crowd-game bound ``T B^2 U^2 kappa zeta_N / 2``.

    :rtype: AlphaReport
    """
    kappa = kernel_curvature(cost.kernel)
    zeta = zeta_exact(cost.interaction)
    B = float(B)
    U = float(U)
    T = float(horizon)
    for name, value in (('B', B), ('U', U), ('horizon', T)):
        if not np.isfinite(value) or value < 0:
            raise DomainError("%s must be finite and non-negative, not %r" % (name, value))
    terms = {
        'half': 0.5,
        'horizon': T,
        'B_squared': B * B,
        'U_squared': U * U,
        'kappa': kappa,
        'zeta': zeta,
    }
    bound = 0.5 * T * (B * B) * (U * U) * kappa * zeta
    return AlphaReport('crowd', bound, terms,
                       {'horizon': T, 'B': B, 'U': U, 'kappa': kappa, 'zeta': zeta})


def game_alpha(game, grid, **kwargs):
    """
    The alpha bound of *game* on *grid*: the crowd bound for crowd
    costs with ``B = max_i B_i``, the general bound otherwise. Both use
    the game's control cap for every ``U_i``.
    """
    b_norms = game.control_effect_norms(grid)
    if isinstance(game.cost, CrowdCost):
        return crowd_alpha(game.cost, float(np.max(b_norms)), game.control_cap, grid.horizon)
    bounds = derivative_bounds(game.cost, horizon=grid.horizon, **kwargs)
    return alpha_bound_general(bounds, b_norms, game.control_cap, grid.horizon)
