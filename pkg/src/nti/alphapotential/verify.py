#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Numerical checks of the identities the method relies on.

Everything here compares quantities on common random numbers: the same
:class:`~.NoiseBundle` drives every rollout, so Monte-Carlo noise
cancels in differences and the deterministic identities of the Euler
scheme hold path by path.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import json
import math

from collections import namedtuple

import numpy as np

from nti.alphapotential import DEFAULT_SEED

from .autodiff import Tape
from .bounds import game_alpha
from .interfaces import DomainError
from .interfaces import IActionSource
from .interfaces import NonFiniteActionError
from .interfaces import ShapeMismatchError
from .optim import AdamState
from .optim import PlateauSchedule
from .optim import adam_step
from .policy import DEFAULT_BLOCKS
from .policy import FeedbackPolicy
from .policy import PolicyParams
from .policy import policy_forward
from .potential import Objective
from .potential import PotentialValue
from .potential import potential_samples
from .simulation import control_increment
from .simulation import control_norms
from .simulation import noise_forcing
from .simulation import player_costs
from .simulation import player_objectives
from .simulation import simulate
from .simulation import simulate_open_loop

__all__ = [
    'direction_sensitivity',
    'analytic_linear_derivative',
    'finite_difference_derivative',
    'SecondDerivative',
    'second_derivative_check',
    'decomposition_error',
    'AuditReport',
    'potential_inequality_audit',
    'best_response_objective',
    'best_response',
    'ExploitabilityReport',
    'exploitability',
]

#: Iterations of each best-response optimization.
DEFAULT_BEST_RESPONSE_BUDGET = 300

#: Constant pieces of a sampled deviation.
DEFAULT_DEVIATION_PIECES = 5

#: Absolute slack added to the audit's statistical allowance.
AUDIT_TOLERANCE = 1e-6


def _player(game, i):
    if not 0 <= i < game.n_players:
        raise DomainError("Player %r out of range for %d players" % (i, game.n_players))
    d, k = game.state_dim, game.action_dim
    return slice(i * d, (i + 1) * d), slice(i * k, (i + 1) * k)


def _batched(values, M, P, width, name):
    values = np.asarray(values, dtype=float)
    if values.shape == (P, width):
        values = np.broadcast_to(values, (M, P, width))
    if values.shape != (M, P, width):
        raise ShapeMismatchError("%s must have shape %s, not %s"
                                 % (name, (M, P, width), values.shape))
    return np.array(values)


def _controls(game, controls, noise):
    return _batched(controls, noise.size, noise.grid.steps, game.action_size, 'controls')


def _direction(game, direction, noise):
    return _batched(direction, noise.size, noise.grid.steps, game.action_dim, 'direction')


def _objective(game, controls, noise, i):
    return float(np.mean(player_costs(simulate_open_loop(game, controls, noise), game)[:, i]))


def direction_sensitivity(game, grid, i, direction):
    """
    Player *i*'s sensitivity ``Y`` to the control *direction*
    (``[M, P, k]``): ``Y_0 = 0`` and ``Y_{l+1} = Y_l + b_i(t_l) u'_l delta``.

    :return: ``[M, P + 1, d]``
    """
    _player(game, i)
    blocks = game.drift_blocks(grid)[:, i:i + 1]
    M = direction.shape[0]
    Y = np.zeros((M, grid.steps + 1, game.state_dim))
    for step in range(grid.steps):
        Y[:, step + 1] = Y[:, step] + control_increment(
            blocks[step], np.ascontiguousarray(direction[:, step]), 1, game.action_dim, grid.delta)
    return Y


def analytic_linear_derivative(game, controls, i, direction, noise):
    """
    The derivative of player *i*'s objective at the open-loop
    *controls* in the *direction* of player *i*'s control:
    ``E[sum_l (Y_l . d_{x_i} f_i + u'_l . d_{a_i} f_i) delta + Y_P . d_{x_i} g_i]``.
    """
    sx, sa = _player(game, i)
    controls = _controls(game, controls, noise)
    direction = _direction(game, direction, noise)
    grid = noise.grid
    paths = simulate_open_loop(game, controls, noise)
    Y = direction_sensitivity(game, grid, i, direction)
    cost = game.cost
    running = np.zeros(noise.size)
    for step, t in enumerate(grid.left_nodes.tolist()):
        gx, ga = cost.running_gradient(t, paths.X[:, step], paths.actions[:, step])
        running += (np.sum(Y[:, step] * gx[:, sx], axis=-1)
                    + np.sum(direction[:, step] * ga[:, sa], axis=-1))
    terminal = np.sum(Y[:, -1] * cost.terminal_gradient(paths.X[:, -1])[:, sx], axis=-1)
    return float(np.mean(running * grid.delta + terminal))


def _shifted(controls, sa, direction, epsilon):
    result = controls.copy()
    result[:, :, sa] += epsilon * direction
    return result


def finite_difference_derivative(game, controls, i, direction, noise, epsilon=1e-4):
    """
    The central difference of player *i*'s objective along *direction*.
    """
    _, sa = _player(game, i)
    controls = _controls(game, controls, noise)
    direction = _direction(game, direction, noise)
    plus = _objective(game, _shifted(controls, sa, direction, epsilon), noise, i)
    minus = _objective(game, _shifted(controls, sa, direction, -epsilon), noise, i)
    return (plus - minus) / (2.0 * epsilon)


SecondDerivative = namedtuple('SecondDerivative', 'analytic fd')


def second_derivative_check(game, controls, i, j, dir_i, dir_j, noise, epsilon=1e-3):
    """
    The mixed second derivative of player *i*'s objective along player
    *i*'s *dir_i* and player *j*'s *dir_j*, assembled from the cost's
    cross second derivatives along the paths, and its mixed finite
    difference.

    :rtype: SecondDerivative
    """
    if i == j:
        raise DomainError("A mixed derivative needs two different players")
    _, sa_i = _player(game, i)
    _, sa_j = _player(game, j)
    controls = _controls(game, controls, noise)
    dir_i = _direction(game, dir_i, noise)
    dir_j = _direction(game, dir_j, noise)
    grid = noise.grid
    paths = simulate_open_loop(game, controls, noise)
    Yi = direction_sensitivity(game, grid, i, dir_i)
    Yj = direction_sensitivity(game, grid, j, dir_j)
    cost = game.cost

    total = np.zeros(noise.size)
    for step, t in enumerate(grid.left_nodes.tolist()):
        H = cost.running_cross_hessian(t, paths.X[:, step], paths.actions[:, step], i, j)
        yi, yj = Yi[:, step], Yj[:, step]
        ui, uj = dir_i[:, step], dir_j[:, step]
        total += (np.einsum('md,mde,me->m', yi, H['xx'], yj)
                  + np.einsum('md,mde,me->m', yi, H['xa'], uj)
                  + np.einsum('md,mde,me->m', ui, H['ax'], yj)
                  + np.einsum('md,mde,me->m', ui, H['aa'], uj)) * grid.delta
    G = cost.terminal_cross_hessian(paths.X[:, -1], i, j)
    total += np.einsum('md,mde,me->m', Yi[:, -1], G, Yj[:, -1])
    analytic = float(np.mean(total))

    def J(si, sj):
        shifted = _shifted(_shifted(controls, sa_i, dir_i, si), sa_j, dir_j, sj)
        return _objective(game, shifted, noise, i)
    e = epsilon
    fd = (J(e, e) - J(e, -e) - J(-e, e) + J(-e, -e)) / (4.0 * e * e)
    return SecondDerivative(analytic, fd)


def _source(policy):
    if isinstance(policy, PolicyParams):
        return FeedbackPolicy(policy)
    return policy


def _base_controls(game, policy_or_controls, noise):
    if (isinstance(policy_or_controls, PolicyParams)
            or IActionSource.providedBy(policy_or_controls)
            or callable(policy_or_controls)):
        return simulate(game, _source(policy_or_controls), noise).actions
    return _controls(game, policy_or_controls, noise)


def decomposition_error(game, policy_or_controls, noise, scales=(0.0, 0.25, 0.5, 1.0)):
    """
    The largest deviation, over *scales* ``r`` and every grid node, of
    the states under the scaled controls ``r u`` from
    ``X^u - (1 - r) Y^u``. The Euler scheme is affine in the control,
    so this is rounding error.
    """
    controls = _base_controls(game, policy_or_controls, noise)
    paths = simulate_open_loop(game, controls, noise)
    worst = 0.0
    for r in scales:
        scaled = simulate_open_loop(game, r * controls, noise)
        worst = max(worst, float(np.max(np.abs(scaled.X - (paths.X - (1.0 - r) * paths.Y)))))
    return worst


class AuditReport(object):
    """
    The result of :func:`potential_inequality_audit`.

    ``passed`` is false if any deviation's gap exceeded the bound by
    more than three of its standard errors plus :data:`AUDIT_TOLERANCE`.
    ``stderr`` is the standard error of the largest gap.
    """

    __slots__ = ('kind', 'bound', 'max_gap', 'stderr', 'samples', 'passed',
                 'gaps', 'exceeds_cap')

    def __init__(self, kind, bound, gaps, stderrs, exceeds_cap=False):
        self.kind = kind
        self.bound = float(bound)
        self.gaps = [float(g) for g in gaps]
        worst = int(np.argmax(self.gaps))
        self.max_gap = self.gaps[worst]
        self.stderr = float(stderrs[worst])
        self.samples = len(self.gaps)
        self.passed = all(gap <= self.bound + 3.0 * se + AUDIT_TOLERANCE
                          for gap, se in zip(self.gaps, stderrs))
        self.exceeds_cap = exceeds_cap

    def to_dict(self):
        return {
            'kind': self.kind,
            'bound': self.bound,
            'max_gap': self.max_gap,
            'stderr': self.stderr,
            'samples': self.samples,
            'pass': self.passed,
            'exceeds_cap': self.exceeds_cap,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def __repr__(self):
        return '<%s %s max_gap=%r bound=%r passed=%s>' % (
            type(self).__name__, self.kind, self.max_gap, self.bound, self.passed)


def _sample_deviation(rng, grid, action_dim, pieces, norm):
    levels = rng.standard_normal((pieces, action_dim))
    index = (np.arange(grid.steps) * pieces) // grid.steps
    values = levels[index]
    current = math.sqrt(float(np.sum(values * values)) * grid.delta)
    if current == 0.0 or norm == 0.0:
        return np.zeros_like(values)
    return values * (norm / current)


def potential_inequality_audit(game, policy_or_controls, deviations, noise,
                               kind='alpha', bound=None, seed=DEFAULT_SEED,
                               magnitude=1.0, pieces=DEFAULT_DEVIATION_PIECES,
                               rule=None):
    """
    Compare unilateral changes of the objectives with the changes of
    the potential.

    Each of the *deviations* picks a random player and replaces that
    player's control with a piecewise-constant process with standard
    normal levels, rescaled to a uniformly random fraction of
    ``magnitude * U`` in ``H^2`` norm. Both sides are computed on
    *noise*.

    :keyword str kind: ``'alpha'`` compares ``Phi`` against the game's
        alpha bound; ``'symmetric'`` compares the exact potential of a
        symmetric game against zero.
    :keyword float bound: Overrides the computed bound.
    :rtype: AuditReport
    """
    # pylint:disable=too-many-locals
    if deviations < 1:
        raise DomainError("The audit needs at least one deviation")
    if kind == 'symmetric':
        game.cost.check_symmetric()
        bound = 0.0 if bound is None else bound
    elif kind == 'alpha':
        bound = game_alpha(game, noise.grid).bound if bound is None else bound
    else:
        raise DomainError("Unknown audit kind %r" % (kind,))
    symmetric = kind == 'symmetric'
    grid = noise.grid
    M = noise.size
    U = game.control_cap

    def phi(paths):
        running, terminal = potential_samples(paths, game, rule, symmetric=symmetric)
        return running + terminal

    controls = _base_controls(game, policy_or_controls, noise)
    norms = control_norms(controls, grid, game.n_players, game.action_dim)
    exceeds_cap = bool(np.any(norms > U))
    if exceeds_cap:
        logger.warning("Audited controls have norms %s above the cap U=%s", norms.tolist(), U)
    base = simulate_open_loop(game, controls, noise)
    base_costs = player_costs(base, game)
    base_phi = phi(base)

    gaps = []
    stderrs = []
    for sequence in np.random.SeedSequence(seed).spawn(int(deviations)):
        rng = np.random.default_rng(sequence)
        i = int(rng.integers(game.n_players))
        _, sa = _player(game, i)
        norm = U * magnitude * rng.uniform()
        deviated = controls.copy()
        deviated[:, :, sa] = _sample_deviation(rng, grid, game.action_dim, pieces, norm)
        paths = simulate_open_loop(game, deviated, noise)
        diff = (player_costs(paths, game)[:, i] - base_costs[:, i]) - (phi(paths) - base_phi)
        gaps.append(abs(float(np.mean(diff))))
        stderrs.append(float(np.std(diff, ddof=1) / math.sqrt(M)) if M > 1 else 0.0)
    report = AuditReport(kind, bound, gaps, stderrs, exceeds_cap)
    if not report.passed:
        logger.warning("Potential audit failed: %r", report)
    else:
        logger.debug("Potential audit: %r", report)
    return report


def _with_columns(values, columns, replacement):
    result = values.copy()
    result[:, columns] = replacement
    return result


def best_response_objective(params, game, paths, i):
    """
    Roll out player *i* under the single-player network *params* while
    the other players follow their realized controls in *paths*, and
    record player *i*'s empirical objective.

    The network sees the joint state with player *i*'s own coordinates
    live, and only player *i*'s sensitivity. The other players' states
    do not depend on player *i*'s control, so they are read from
    *paths*.

    :rtype: ~.Objective
    """
    # pylint:disable=too-many-locals
    sx, sa = _player(game, i)
    noise, grid = paths.noise, paths.grid
    M, P = paths.size, grid.steps
    d, k = game.state_dim, game.action_dim
    delta = grid.delta
    cost = game.cost
    blocks = game.drift_blocks(grid)[:, i:i + 1]
    forcing = noise_forcing(game, noise)[:, :, sx]

    tape = Tape()
    bound = params.bind(tape)
    before = tape.constant(np.zeros((M, sx.start)))
    after = tape.constant(np.zeros((M, game.state_size - sx.stop)))

    def joint(step, own):
        return tape.concat([tape.constant(paths.X[:, step, :sx.start]), own,
                            tape.constant(paths.X[:, step, sx.stop:])])

    def running_vjp(g, x, v, t, others):
        x_bar, a_bar = cost.running_value_gradient(t, x, _with_columns(others, sa, v), i)
        return g[:, None] * x_bar, g[:, None] * a_bar[:, sa]

    Xi = tape.constant(np.array(paths.X[:, 0, sx]))
    Yi = tape.constant(np.zeros((M, d)))
    running = None
    for step, t in enumerate(grid.left_nodes.tolist()):
        X = joint(step, Xi)
        a = policy_forward(bound, t, X, tape.concat([before, Yi, after]), tape)
        if not np.all(np.isfinite(a.value)):
            rows = np.flatnonzero(~np.all(np.isfinite(a.value), axis=-1))
            raise NonFiniteActionError(step, int(rows[0]))
        others = np.array(paths.actions[:, step])
        f = tape.custom(
            [X, a],
            lambda x, v, t=t, others=others: cost.running_value(
                t, x, _with_columns(others, sa, v))[:, i],
            lambda g, x, v, t=t, others=others: running_vjp(g, x, v, t, others),
            name='f')
        term = tape.scale(f, delta)
        running = term if running is None else tape.add(running, term)
        B = blocks[step]
        move = tape.custom(
            [a],
            lambda v, B=B: control_increment(B, v, 1, k, delta),
            lambda g, v, B=B: (np.einsum('nij,mni->mnj', B, g.reshape(M, 1, d))
                               .reshape(M, k) * delta,),
            name='drift')
        Xi = tape.add(tape.add(Xi, move), tape.constant(forcing[:, step]))
        Yi = tape.add(Yi, move)

    X = joint(P, Xi)
    g = tape.custom(
        [X],
        lambda x: cost.terminal_value(x)[:, i],
        lambda gbar, x: (gbar[:, None] * cost.terminal_value_gradient(x, i),),
        name='g')
    output = tape.add(tape.mean(running), tape.mean(g))
    return Objective(tape, output, PotentialValue.from_samples(running.value, g.value), None)


def best_response(game, paths, i, budget=DEFAULT_BEST_RESPONSE_BUDGET,
                  learning_rate=1e-3, seed=DEFAULT_SEED, width=None,
                  blocks=DEFAULT_BLOCKS, schedule=None):
    """
    Train a fresh network for player *i* against the other players'
    realized controls in *paths* for *budget* Adam iterations with the
    plateau schedule.

    The network is trained and selected on *paths*' noise, so *value*
    is an in-sample estimate of player *i*'s best objective; see
    *holdout* in :func:`exploitability`.

    :return: ``(params, value)``, the best network seen and its
        objective on *paths*' noise.
    """
    grid = paths.grid
    params = PolicyParams.initialized(1, game.state_size, game.action_dim,
                                      grid.horizon, seed, width, blocks)
    adam = AdamState.zeros(params.size, learning_rate)
    schedule = schedule or PlateauSchedule()
    state = schedule.initial(learning_rate)
    best, best_params = float('inf'), params
    for iteration in range(int(budget) + 1):
        objective = best_response_objective(params, game, paths, i)
        value = objective.potential.value
        if not np.isfinite(value):
            logger.warning("Best response of player %d diverged at iteration %d", i, iteration)
            break
        if value < best:
            best, best_params = value, params
        if iteration == budget:
            break
        grads = objective.gradient()
        if not np.all(np.isfinite(grads)):
            logger.warning("Best response of player %d has a non-finite gradient "
                           "at iteration %d", i, iteration)
            break
        flat, adam = adam_step(params.flat(), grads, adam)
        state = schedule.observe(state, value)
        adam = adam.with_learning_rate(state.learning_rate)
        params = params.with_flat(flat)
    return best_params, best


class ExploitabilityReport(object):
    """
    Per-player improvements found by best responses.

    ``epsilons[i]`` is ``max(0, J_i(joint) - J_i(best response))``. The
    best responses are inexact, so these are lower bounds on the true
    improvements. When :attr:`in_sample` is true both objectives were
    measured on the noise the best responses were trained on, which
    biases the improvements upward.
    """

    def __init__(self, joint, best_responses, budget, in_sample=True):
        self.joint = [float(v) for v in joint]
        self.best_responses = dict((int(i), float(v)) for i, v in best_responses.items())
        self.epsilons = dict((i, max(0.0, self.joint[i] - v))
                             for i, v in self.best_responses.items())
        self.budget = int(budget)
        #: Whether the objectives were scored on the training noise.
        self.in_sample = bool(in_sample)

    @property
    def max_epsilon(self):
        return max(self.epsilons.values()) if self.epsilons else 0.0

    def to_dict(self):
        return {
            'joint': self.joint,
            'best_responses': {str(i): v for i, v in sorted(self.best_responses.items())},
            'epsilons': {str(i): v for i, v in sorted(self.epsilons.items())},
            'max_epsilon': self.max_epsilon,
            'budget': self.budget,
            'in_sample': self.in_sample,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def __repr__(self):
        return '<%s max_epsilon=%r budget=%d in_sample=%r>' % (
            type(self).__name__, self.max_epsilon, self.budget, self.in_sample)


def exploitability(game, policy, noise, budget=DEFAULT_BEST_RESPONSE_BUDGET,
                   players=None, holdout=None, **kwargs):
    """
    How much each player gains by deviating alone from *policy*.

    The joint policy is rolled out once on *noise*; each player in
    *players* (by default all) then best-responds to the others'
    realized controls. Extra keyword arguments go to
    :func:`best_response`.

    Without *holdout* the improvements are in-sample: each best
    response is trained and scored on *noise*. Given a second
    :class:`~nti.alphapotential.noise.NoiseBundle` *holdout*, the joint
    policy and every trained best response are scored on it instead.

    :rtype: ExploitabilityReport
    """
    logger.info("Computing best responses with a budget of %d iterations", budget)
    source = _source(policy)
    paths = simulate(game, source, noise)
    scored = paths if holdout is None else simulate(game, source, holdout)
    joint = player_objectives(scored, game)
    players = range(game.n_players) if players is None else players
    found = {}
    for i in players:
        params, value = best_response(game, paths, i, budget, **kwargs)
        if holdout is not None:
            value = best_response_objective(params, game, scored, i).potential.value
        found[i] = value
        logger.debug("Player %d: joint %r, best response %r", i, joint[i], value)
    report = ExploitabilityReport(joint, found, budget, in_sample=holdout is None)
    logger.info("Exploitability %r", report)
    return report
