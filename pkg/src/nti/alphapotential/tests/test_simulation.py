#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import print_function, absolute_import, division

# pylint:disable=too-many-public-methods

import io
import math
import os
import shutil
import tempfile
import unittest

import numpy as np

from hamcrest import assert_that
from hamcrest import is_
from hamcrest import calling
from hamcrest import raises
from hamcrest import close_to
from hamcrest import has_property
from hamcrest import less_than_or_equal_to

from nti.testing.matchers import has_length

from ..game import GameSpec
from ..game import TimeGrid
from ..interfaces import NonFiniteActionError
from ..interfaces import ShapeMismatchError
from ..noise import sample_noise
from ..simulation import PathBatch
from ..simulation import control_norms
from ..simulation import noise_forcing
from ..simulation import player_costs
from ..simulation import player_objectives
from ..simulation import simulate
from ..simulation import simulate_open_loop

from . import games


def zero_policy(t, x, y): # pylint:disable=unused-argument
    return np.zeros((x.shape[0], x.shape[1]))


def wobbly_policy(t, x, y):
    # Any smooth feedback of the state and sensitivity will do.
    mix = np.roll(x, 1, axis=1) - 0.5 * y
    return np.tanh(mix + t)


class TestSimulate(unittest.TestCase):

    grid = TimeGrid(1.0, 50)

    def test_zero_policy_no_noise(self):
        game = games.deterministic_game(3, 2)
        paths = simulate(game, zero_policy, sample_noise(game, self.grid, 2, 1))
        start = game.initial_states.ravel()
        for step in range(self.grid.steps + 1):
            assert_that(paths.X[:, step].tolist(), is_([start.tolist()] * 2))
        assert_that(float(np.max(np.abs(paths.Y))), is_(0.0))

    def test_constant_policy_sensitivity(self):
        game = games.deterministic_game(2, 2)
        a = np.array([0.3, -0.2, 1.0, 0.5])
        paths = simulate(game, lambda t, x, y: np.tile(a, (x.shape[0], 1)),
                         sample_noise(game, self.grid, 1, 1))
        assert_that(np.max(np.abs(paths.Y[0, -1] - a)), less_than_or_equal_to(1e-12))
        assert_that(paths.Y[0, 0].tolist(), is_([0.0] * 4))

    def test_scaled_actions(self):
        game = games.noisy_game(2, 2)
        noise = sample_noise(game, self.grid, 16, 3)
        base = simulate(game, wobbly_policy, noise)
        for r in (0.0, 0.25, 0.5, 1.0):
            scaled = simulate_open_loop(game, r * base.actions, noise)
            expected = base.X - (1 - r) * base.Y
            assert_that(np.max(np.abs(scaled.X - expected)), less_than_or_equal_to(1e-12))

    def test_open_loop_matches_feedback(self):
        game = games.noisy_game(3, 2)
        noise = sample_noise(game, self.grid, 8, 4)
        base = simulate(game, wobbly_policy, noise)
        assert_that(simulate_open_loop(game, base.actions, noise), is_(base))
        zero = simulate_open_loop(game, np.zeros_like(base.actions), noise)
        assert_that(zero, is_(simulate(game, zero_policy, noise)))

    def test_players_are_isolated(self):
        game = games.noisy_game(3, 2)
        noise = sample_noise(game, self.grid, 4, 5)
        base = simulate(game, wobbly_policy, noise)
        controls = base.actions.copy()
        controls[:, :, 0:2] += 1.0
        moved = simulate_open_loop(game, controls, noise)
        assert_that(np.array_equal(moved.X[:, :, 2:], base.X[:, :, 2:]), is_(True))
        assert_that(np.array_equal(moved.Y[:, :, 2:], base.Y[:, :, 2:]), is_(True))
        assert_that(np.array_equal(moved.X[:, :, :2], base.X[:, :, :2]), is_(False))

    def test_zero_control_is_martingale(self):
        game = games.noisy_game(2, 2, sigma=0.3, jump=0.2, intensity=3.0)
        grid = TimeGrid(1.0, 10)
        paths = simulate(game, zero_policy, sample_noise(game, grid, 20000, 2025))
        change = paths.X[:, -1] - paths.X[:, 0]
        stderr = np.std(change, axis=0) / math.sqrt(len(change))
        assert_that(bool(np.all(np.abs(np.mean(change, axis=0)) <= 4 * stderr)), is_(True))

    def test_weak_error_is_first_order(self):
        # With b(t) = 1 + t and a = 1 the exact mean of X_T is 1.5; the
        # left-point rule reaches 1.5 - delta / 2.
        cost = games.crowd_cost(1, 1, targets=[[0.0]], terminal_weight=1.0)
        game = GameSpec(1, 1, 1, lambda t: [[1.0 + t]], [[0.3]], [[0.1]], [2.0],
                        [[0.0]], cost)
        sizes = (25, 50, 100, 200)
        errors = []
        for steps in sizes:
            noise = sample_noise(game, TimeGrid(1.0, steps), 4000, 2025)
            paths = simulate(game, lambda t, x, y: np.ones((x.shape[0], 1)), noise)
            exact = 1.5 + np.sum(noise_forcing(game, noise), axis=1)
            g = cost.terminal_value(paths.X[:, -1])[:, 0]
            errors.append(abs(float(np.mean(g - cost.terminal_value(exact)[:, 0]))))
        slope = np.polyfit(np.log(sizes), np.log(errors), 1)[0]
        assert_that(slope, close_to(-1.0, 0.1))
        assert_that(errors[-1], close_to(1.5 / 200, 1.5 / 2000))

    def test_non_finite_action(self):
        game = games.deterministic_game(2, 2)
        noise = sample_noise(game, self.grid, 3, 1)

        def policy(t, x, y):
            a = zero_policy(t, x, y)
            if t >= 3 * self.grid.delta - 1e-12:
                a[2, 1] = np.nan
            return a

        with self.assertRaises(NonFiniteActionError) as exc:
            simulate(game, policy, noise)
        assert_that(exc.exception, has_property('step', 3))
        assert_that(exc.exception, has_property('trajectory', 2))

        controls = np.zeros((3, 50, 4))
        controls[1, 7, 0] = np.inf
        with self.assertRaises(NonFiniteActionError) as exc:
            simulate_open_loop(game, controls, noise)
        assert_that(exc.exception, has_property('step', 7))
        assert_that(exc.exception, has_property('trajectory', 1))

    def test_shape_mismatch(self):
        game = games.deterministic_game(2, 2)
        noise = sample_noise(game, self.grid, 3, 1)
        assert_that(calling(simulate).with_args(game, lambda t, x, y: np.zeros((3, 3)), noise),
                    raises(ShapeMismatchError))
        assert_that(calling(simulate_open_loop).with_args(game, np.zeros((3, 49, 4)), noise),
                    raises(ShapeMismatchError))
        other = games.noisy_game(2, 2)
        assert_that(calling(simulate).with_args(other, zero_policy, noise),
                    raises(ShapeMismatchError))

    def test_not_a_policy(self):
        game = games.deterministic_game(2, 2)
        assert_that(calling(simulate).with_args(game, 42, sample_noise(game, self.grid, 1, 1)),
                    raises(TypeError))


class TestPathBatch(unittest.TestCase):

    def setUp(self):
        game = games.noisy_game(2, 1)
        self.paths = simulate(game, wobbly_policy, sample_noise(game, TimeGrid(1.0, 4), 2, 6))
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_csv(self):
        stream = io.StringIO()
        self.paths.to_csv(stream)
        lines = stream.getvalue().splitlines()
        assert_that(lines[0], is_('trajectory,step,t,x0,x1,y0,y1,a0,a1'))
        assert_that(lines, has_length(1 + 2 * 5))
        assert_that(lines[1].split(',')[:3], is_(['0', '0', '0.0']))
        assert_that(lines[5].split(',')[-2:], is_(['', '']))
        assert_that(float(lines[2].split(',')[3]), is_(float(self.paths.X[0, 1, 0])))

    def test_save_load(self):
        path = os.path.join(self.tmpdir, 'paths.npz')
        self.paths.save(path)
        assert_that(PathBatch.load(path), is_(self.paths))


class TestCosts(unittest.TestCase):

    def test_single_player(self):
        cost = games.crowd_cost(1, 1, targets=[[0.5]])
        game = GameSpec(1, 1, 1, np.eye(1), np.zeros((1, 1)), np.zeros((1, 0)), [],
                        [[0.0]], cost)
        grid = TimeGrid(1.0, 10)
        noise = sample_noise(game, grid, 2, 1)
        paths = simulate_open_loop(game, np.full((2, 10, 1), 0.5), noise)
        costs = player_costs(paths, game)
        assert_that(costs.shape, is_((2, 1)))
        # The walk ends on the target; only the running cost remains.
        assert_that(costs[0, 0], close_to(0.5 * 0.1 * 0.25, 1e-12))
        assert_that(player_objectives(paths, game)[0], close_to(0.0125, 1e-12))

    def test_control_norms(self):
        grid = TimeGrid(2.0, 8)
        actions = np.tile([3.0, 4.0, 1.0, 0.0], (5, 8, 1))
        norms = control_norms(actions, grid, 2, 2)
        assert_that(norms[0], close_to(5.0 * math.sqrt(2.0), 1e-12))
        assert_that(norms[1], close_to(math.sqrt(2.0), 1e-12))


if __name__ == '__main__':
    unittest.main()
