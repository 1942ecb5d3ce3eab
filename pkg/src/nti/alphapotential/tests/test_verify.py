#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import print_function, absolute_import, division

# pylint:disable=too-many-public-methods

import json
import unittest

import numpy as np

from hamcrest import assert_that
from hamcrest import is_
from hamcrest import calling
from hamcrest import raises
from hamcrest import close_to
from hamcrest import greater_than
from hamcrest import has_entries
from hamcrest import less_than_or_equal_to

from ..game import CallbackCost
from ..game import TimeGrid
from ..interfaces import DomainError
from ..interfaces import ShapeMismatchError
from ..interfaces import SymmetryViolation
from ..kernels import Gaussian
from ..lqr import tracking_oracle
from ..noise import sample_noise
from ..policy import PolicyParams
from ..presets import get_preset
from ..simulation import player_objectives
from ..simulation import simulate
from ..verify import ExploitabilityReport
from ..verify import analytic_linear_derivative
from ..verify import decomposition_error
from ..verify import direction_sensitivity
from ..verify import exploitability
from ..verify import finite_difference_derivative
from ..verify import potential_inequality_audit
from ..verify import second_derivative_check

from . import games


def random_controls(game, noise, seed, scale=0.5):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((noise.size, noise.grid.steps, game.action_size))


def random_direction(game, noise, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((noise.size, noise.grid.steps, game.action_dim))


def one_sided_table():
    q = np.zeros((3, 3))
    q[0, 1] = 2.0
    return q


def zero_cost(n_players, dim):
    D = n_players * dim * 2

    def zeros(*tail):
        return lambda *args: np.zeros(np.shape(args[-1])[:-1] + tail)

    return CallbackCost(n_players, dim, dim,
                        zeros(n_players), zeros(n_players, D), zeros(n_players, D, D),
                        zeros(n_players), zeros(n_players, n_players * dim),
                        zeros(n_players, n_players * dim, n_players * dim),
                        affine_gradients=True)


class TestLinearDerivative(unittest.TestCase):

    def test_sensitivity(self):
        game = games.deterministic_game(2, 2, drift=2.0 * np.eye(2))
        grid = games.grid(10)
        Y = direction_sensitivity(game, grid, 1, np.ones((3, 10, 2)))
        assert_that(Y.shape, is_((3, 11, 2)))
        assert_that(Y[0, 0].tolist(), is_([0.0, 0.0]))
        assert_that(float(np.max(np.abs(Y[:, -1] - 2.0))), close_to(0.0, 1e-14))

    def test_terminal_only(self):
        # Without running costs and with a constant control u, the
        # objective is c |x0 + u T - z|^2.
        c, z, u, du = 0.7, 0.25, 0.4, -1.5
        cost = games.crowd_cost(1, 1, control_weight=0.0, terminal_weight=c, targets=[[z]])
        game = games.deterministic_game(1, 1, cost=cost)
        grid = games.grid(8)
        noise = sample_noise(game, grid, 1, 3)
        x0 = float(game.initial_states[0, 0])
        derivative = analytic_linear_derivative(
            game, np.full((8, 1), u), 0, np.full((8, 1), du), noise)
        assert_that(derivative, close_to(2.0 * c * (x0 + u - z) * du, 1e-12))

    def test_zero_direction(self):
        game = games.noisy_game(3, 2)
        noise = sample_noise(game, games.grid(6), 4, 1)
        derivative = analytic_linear_derivative(
            game, random_controls(game, noise, 2), 1, np.zeros((6, 2)), noise)
        assert_that(derivative, is_(0.0))

    def test_matches_finite_difference(self):
        game = games.noisy_game(3, 2, kernel=Gaussian(1.0, 1.0))
        noise = sample_noise(game, games.grid(10), 8, 5)
        controls = random_controls(game, noise, 6)
        for i in range(3):
            direction = random_direction(game, noise, 10 + i)
            analytic = analytic_linear_derivative(game, controls, i, direction, noise)
            fd = finite_difference_derivative(game, controls, i, direction, noise)
            assert_that(analytic, close_to(fd, 1e-6 * max(1.0, abs(fd))))

    def test_linear_in_direction(self):
        game = games.noisy_game(2, 2, kernel=Gaussian(1.0, 2.0))
        noise = sample_noise(game, games.grid(6), 4, 8)
        controls = random_controls(game, noise, 9)
        first = random_direction(game, noise, 1)
        second = random_direction(game, noise, 2)
        combined = analytic_linear_derivative(game, controls, 0, first + 2.0 * second, noise)
        separate = (analytic_linear_derivative(game, controls, 0, first, noise)
                    + 2.0 * analytic_linear_derivative(game, controls, 0, second, noise))
        assert_that(combined, close_to(separate, 1e-12 * max(1.0, abs(separate))))

    def test_rejects(self):
        game = games.noisy_game(2, 2)
        noise = sample_noise(game, games.grid(6), 4, 8)
        controls = random_controls(game, noise, 9)
        assert_that(calling(analytic_linear_derivative).with_args(
            game, controls, 2, np.zeros((6, 2)), noise), raises(DomainError))
        assert_that(calling(analytic_linear_derivative).with_args(
            game, controls, 0, np.zeros((5, 2)), noise), raises(ShapeMismatchError))
        assert_that(calling(finite_difference_derivative).with_args(
            game, controls[:, :3], 0, np.zeros((6, 2)), noise), raises(ShapeMismatchError))


class TestSecondDerivative(unittest.TestCase):

    def test_no_interaction(self):
        game = games.noisy_game(2, 2, interaction=0.0)
        noise = sample_noise(game, games.grid(6), 4, 2)
        result = second_derivative_check(
            game, random_controls(game, noise, 3), 0, 1,
            random_direction(game, noise, 4), random_direction(game, noise, 5), noise)
        assert_that(result.analytic, is_(0.0))
        assert_that(result.fd, close_to(0.0, 1e-8))

    def test_quadratic_kernel_is_exact(self):
        # Every objective is quadratic in the controls.
        game = games.noisy_game(3, 2, interaction=one_sided_table())
        noise = sample_noise(game, games.grid(8), 6, 2)
        controls = random_controls(game, noise, 3)
        direction = random_direction(game, noise, 4)
        result = second_derivative_check(game, controls, 0, 1, direction, direction, noise)
        assert_that(abs(result.analytic), greater_than(1e-3))
        assert_that(result.analytic, close_to(result.fd, 1e-7))

    def test_gaussian_kernel(self):
        game = games.noisy_game(3, 2, kernel=Gaussian(1.0, 1.0), interaction=one_sided_table())
        noise = sample_noise(game, games.grid(8), 6, 2)
        result = second_derivative_check(
            game, random_controls(game, noise, 3), 1, 0,
            random_direction(game, noise, 4), random_direction(game, noise, 5), noise)
        assert_that(result.analytic, close_to(result.fd, 1e-4 * max(1.0, abs(result.analytic))))

    def test_symmetric_game_swaps(self):
        game = games.noisy_game(3, 2, kernel=Gaussian(1.0, 1.0))
        noise = sample_noise(game, games.grid(8), 6, 2)
        controls = random_controls(game, noise, 3)
        first = random_direction(game, noise, 4)
        second = random_direction(game, noise, 5)
        forward = second_derivative_check(game, controls, 0, 2, first, second, noise)
        backward = second_derivative_check(game, controls, 2, 0, second, first, noise)
        assert_that(forward.analytic, close_to(backward.analytic, 1e-10))

    def test_rejects_same_player(self):
        game = games.noisy_game(2, 2)
        noise = sample_noise(game, games.grid(4), 2, 2)
        direction = np.zeros((4, 2))
        assert_that(calling(second_derivative_check).with_args(
            game, random_controls(game, noise, 1), 1, 1, direction, direction, noise),
                    raises(DomainError))


class TestDecomposition(unittest.TestCase):

    def test_open_loop(self):
        game = games.noisy_game(3, 2)
        noise = sample_noise(game, games.grid(10), 16, 4)
        error = decomposition_error(game, random_controls(game, noise, 1, scale=2.0), noise)
        assert_that(error, less_than_or_equal_to(1e-12))

    def test_feedback(self):
        game = games.noisy_game(2, 2)
        grid = games.grid(10)
        noise = sample_noise(game, grid, 8, 4)
        params = PolicyParams.for_game(game, grid, 3, width=5, blocks=1)
        params = params.with_flat(params.flat() + 0.3)
        assert_that(decomposition_error(game, params, noise), less_than_or_equal_to(1e-12))


class TestAudit(unittest.TestCase):

    def test_symmetric_game(self):
        game = games.deterministic_game(3, 2)
        noise = sample_noise(game, games.grid(10), 2, 1)
        report = potential_inequality_audit(
            game, random_controls(game, noise, 2, scale=0.3), 8, noise, kind='symmetric')
        assert_that(report.bound, is_(0.0))
        assert_that(report.samples, is_(8))
        assert_that(report.max_gap, less_than_or_equal_to(1e-9))
        assert_that(report.passed, is_(True))

    def test_symmetric_rejects_asymmetric_game(self):
        cost = games.crowd_cost(3, 2, interaction=one_sided_table())
        game = games.deterministic_game(3, 2, cost=cost)
        noise = sample_noise(game, games.grid(10), 2, 1)
        assert_that(calling(potential_inequality_audit).with_args(
            game, np.zeros((10, 6)), 3, noise, kind='symmetric'), raises(SymmetryViolation))

    def test_alpha_from_initial_policy(self):
        # The initial network plays zero, and a deviation from zero
        # controls moves the potential exactly as the objective.
        cost = games.crowd_cost(3, 2, interaction=one_sided_table())
        game = games.deterministic_game(3, 2, cost=cost)
        grid = games.grid(10)
        noise = sample_noise(game, grid, 2, 1)
        params = PolicyParams.for_game(game, grid, 5, width=4, blocks=1)
        report = potential_inequality_audit(game, params, 6, noise)
        assert_that(report.kind, is_('alpha'))
        assert_that(report.bound, close_to(0.5, 1e-12))
        assert_that(report.max_gap, less_than_or_equal_to(1e-9))
        assert_that(report.passed, is_(True))
        assert_that(report.exceeds_cap, is_(False))

    def test_detects_asymmetry(self):
        cost = games.crowd_cost(3, 2, interaction=one_sided_table())
        game = games.deterministic_game(3, 2, cost=cost)
        noise = sample_noise(game, games.grid(10), 2, 1)
        report = potential_inequality_audit(game, np.full((10, 6), 0.5), 20, noise, bound=0.0)
        assert_that(report.max_gap, greater_than(1e-6))
        assert_that(report.passed, is_(False))
        loaded = json.loads(report.to_json())
        assert_that(loaded, has_entries({'pass': False, 'kind': 'alpha', 'samples': 20}))

    def test_zero_magnitude(self):
        game = games.noisy_game(2, 2)
        noise = sample_noise(game, games.grid(6), 4, 1)
        report = potential_inequality_audit(game, np.zeros((6, 4)), 3, noise, magnitude=0.0)
        assert_that(report.max_gap, is_(0.0))
        assert_that(report.stderr, is_(0.0))

    def test_flags_large_controls(self):
        game = games.deterministic_game(2, 2)
        noise = sample_noise(game, games.grid(6), 2, 1)
        report = potential_inequality_audit(game, np.full((6, 4), 5.0), 2, noise)
        assert_that(report.exceeds_cap, is_(True))
        assert_that(report.to_dict(), has_entries(exceeds_cap=True))

    def test_rejects(self):
        game = games.deterministic_game(2, 2)
        noise = sample_noise(game, games.grid(6), 2, 1)
        controls = np.zeros((6, 4))
        assert_that(calling(potential_inequality_audit).with_args(game, controls, 0, noise),
                    raises(DomainError))
        assert_that(calling(potential_inequality_audit).with_args(
            game, controls, 2, noise, kind='nash'), raises(DomainError))


class TestExploitability(unittest.TestCase):

    def test_report(self):
        report = ExploitabilityReport([1.0, 2.0], {0: 0.5, 1: 2.5}, 10)
        assert_that(report.epsilons, is_({0: 0.5, 1: 0.0}))
        assert_that(report.max_epsilon, is_(0.5))
        assert_that(json.loads(report.to_json()),
                    has_entries(max_epsilon=0.5, budget=10, epsilons={'0': 0.5, '1': 0.0},
                                in_sample=True))
        held_out = ExploitabilityReport([1.0], {0: 0.5}, 10, in_sample=False)
        assert_that(held_out.to_dict(), has_entries(in_sample=False))

    def test_costless_game(self):
        game = games.deterministic_game(2, 1, cost=zero_cost(2, 1))
        noise = sample_noise(game, games.grid(5), 2, 1)
        report = exploitability(game, lambda t, x, y: np.zeros((len(x), 2)), noise,
                                budget=2, width=3, blocks=1)
        assert_that(report.joint, is_([0.0, 0.0]))
        assert_that(report.max_epsilon, is_(0.0))
        assert_that(report.in_sample, is_(True))

    def test_holdout_scores_on_fresh_noise(self):
        game = games.noisy_game(2, 1)
        grid = games.grid(5)
        noise = sample_noise(game, grid, 8, 1)
        holdout = sample_noise(game, grid, 8, 2)

        def still(t, x, y): # pylint:disable=unused-argument
            return np.zeros((len(x), 2))

        report = exploitability(game, still, noise, budget=2, width=3, blocks=1,
                                holdout=holdout)
        fresh = player_objectives(simulate(game, still, holdout), game)
        assert_that(report.in_sample, is_(False))
        assert_that(report.joint, is_([float(v) for v in fresh]))
        assert_that(report.to_dict(), has_entries(in_sample=False, budget=2))

    def test_optimal_feedback_is_unexploitable(self):
        experiment = get_preset('lqr-oracle')
        game = experiment.game
        grid = TimeGrid(1.0, 10)
        oracle = tracking_oracle(game, grid)
        gains = oracle.solution.gains
        target = game.cost.targets[0]

        def riccati_policy(t, x, y): # pylint:disable=unused-argument
            step = int(round(t / grid.delta))
            return -(x - target) @ gains[step].T

        noise = sample_noise(game, grid, 1, 1)
        report = exploitability(game, riccati_policy, noise, budget=3, width=4, blocks=1,
                                learning_rate=1e-2)
        assert_that(report.joint[0], close_to(oracle.cost, 1e-12))
        assert_that(report.max_epsilon, less_than_or_equal_to(1e-9))


if __name__ == '__main__':
    unittest.main()
