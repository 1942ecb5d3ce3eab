#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import print_function, absolute_import, division

import os
import shutil
import tempfile
import unittest

import numpy as np

from hamcrest import assert_that
from hamcrest import is_
from hamcrest import is_not as does_not
from hamcrest import calling
from hamcrest import raises

from nti.testing.matchers import has_length
from nti.testing.matchers import validly_provides

from ..autodiff import Tape
from ..game import TimeGrid
from ..interfaces import DomainError
from ..interfaces import IActionSource
from ..interfaces import ShapeMismatchError
from ..optim import AdamState
from ..optim import ScheduleState
from ..policy import FeedbackPolicy
from ..policy import PolicyParams
from ..policy import load_checkpoint
from ..policy import policy_forward
from ..policy import save_checkpoint

from . import games


class TestPolicyParams(unittest.TestCase):

    game = games.deterministic_game(2, 2)
    grid = TimeGrid(1.0, 10)

    def test_default_shape(self):
        params = PolicyParams.for_game(self.game, self.grid, 2025)
        # 1 + 2 * N * d inputs, ten more hidden units, four blocks.
        assert_that(params.input_size, is_(9))
        assert_that(params.width, is_(19))
        assert_that(params.layers, has_length(10))
        assert_that(params.size, is_(19 * 10 + 8 * 19 * 20 + 4 * 20))

    def test_starts_at_zero_control(self):
        params = PolicyParams.for_game(self.game, self.grid, 2025)
        x = np.random.default_rng(0).normal(size=(5, 4))
        assert_that(policy_forward(params, 0.3, x, x).tolist(), is_(np.zeros((5, 4)).tolist()))

    def test_deterministic_init(self):
        first = PolicyParams.for_game(self.game, self.grid, 1)
        assert_that(first, is_(PolicyParams.for_game(self.game, self.grid, 1)))
        assert_that(first, does_not(PolicyParams.for_game(self.game, self.grid, 2)))

    def test_flat(self):
        params = PolicyParams.for_game(self.game, self.grid, 3, width=5, blocks=1)
        flat = params.flat()
        assert_that(flat, has_length(params.size))
        assert_that(params.with_flat(flat), is_(params))
        assert_that(flat[:5].tolist(), is_(params.layers[0][0][0, :5].tolist()))
        assert_that(calling(params.with_flat).with_args(flat[1:]), raises(ShapeMismatchError))

    def test_bad_layers(self):
        assert_that(calling(PolicyParams).with_args(2, 2, 2, 1.0, 5, 1, [(np.zeros((5, 9)), np.zeros(5))]),
                    raises(ShapeMismatchError))


class TestPolicyForward(unittest.TestCase):

    game = games.deterministic_game(2, 2)
    grid = TimeGrid(2.0, 10)

    def params(self):
        params = PolicyParams.for_game(self.game, self.grid, 4, width=7, blocks=2)
        rng = np.random.default_rng(4)
        return params.with_flat(params.flat() + 0.2 * rng.normal(size=params.size))

    def test_tape_matches_arrays(self):
        params = self.params()
        rng = np.random.default_rng(1)
        x, y = rng.normal(size=(6, 4)), rng.normal(size=(6, 4))
        tape = Tape()
        recorded = policy_forward(params, 0.5, tape.constant(x), tape.constant(y), tape)
        assert_that(recorded.value.tolist(), is_(policy_forward(params, 0.5, x, y).tolist()))
        assert_that(tape.parameters, has_length(2 * len(params.layers)))

    def test_time_is_normalized(self):
        params = self.params()
        x = np.zeros((1, 4))
        other = PolicyParams(2, 2, 2, 1.0, params.width, params.blocks, params.layers)
        assert_that(policy_forward(params, 1.0, x, x).tolist(),
                    is_(policy_forward(other, 0.5, x, x).tolist()))

    def test_feedback_policy(self):
        policy = FeedbackPolicy(self.params())
        assert_that(policy, validly_provides(IActionSource))
        actions = policy.actions(0.0, np.ones((3, 4)), np.zeros((3, 4)))
        assert_that(actions.shape, is_((3, 4)))

    def test_rejects_non_finite(self):
        params = self.params()
        x = np.zeros((1, 4))
        assert_that(calling(policy_forward).with_args(params, 0.0, x + np.nan, x),
                    raises(DomainError))
        W, b = params.layers[0]
        params.layers[0] = (W * np.inf, b)
        assert_that(calling(policy_forward).with_args(params, 0.0, x, x), raises(DomainError))


class TestCheckpoint(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_round_trip(self):
        game = games.deterministic_game(3, 1)
        params = PolicyParams.for_game(game, TimeGrid(1.5, 10), 5, blocks=2)
        adam = AdamState(np.full(params.size, 0.1), np.full(params.size, 0.2), 7, 5e-4)
        schedule = ScheduleState(5e-4, 1.25, 3)
        path = save_checkpoint(os.path.join(self.tmpdir, 'checkpoint.npz'),
                               params, adam, schedule, 42)
        checkpoint = load_checkpoint(path)
        assert_that(checkpoint.params, is_(params))
        assert_that(checkpoint.params.horizon, is_(1.5))
        assert_that(checkpoint.adam, is_(adam))
        assert_that(checkpoint.schedule, is_(schedule))
        assert_that(checkpoint.iteration, is_(42))

    def test_params_only(self):
        game = games.deterministic_game(2, 2)
        params = PolicyParams.for_game(game, TimeGrid(1.0, 10), 5)
        path = save_checkpoint(os.path.join(self.tmpdir, 'only.npz'), params)
        checkpoint = load_checkpoint(path)
        assert_that(checkpoint.params, is_(params))
        assert_that(checkpoint.adam, is_(None))
        assert_that(checkpoint.schedule, is_(None))
        assert_that(checkpoint.iteration, is_(0))


if __name__ == '__main__':
    unittest.main()
