#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import print_function, absolute_import, division

# pylint:disable=too-many-public-methods

import os
import shutil
import tempfile
import unittest

import numpy as np

from hamcrest import assert_that
from hamcrest import is_
from hamcrest import calling
from hamcrest import raises
from hamcrest import contains_string

from ..config import Experiment
from ..config import emit_config
from ..config import format_float
from ..config import format_matrix
from ..config import load_config
from ..config import parse_config
from ..config import parse_matrix
from ..config import write_config
from ..game import GameSpec
from ..interfaces import ConfigError
from ..kernels import SmoothedIndicator
from ..loop import TrainConfig
from ..presets import crowd_game
from ..presets import get_preset
from ..presets import preset_names

from . import games


def lqr_text():
    return emit_config(get_preset('lqr-oracle'))


class TestFormats(unittest.TestCase):

    def test_floats_round_trip(self):
        for value in (0.1, 1.0 / 3.0, 1e-300, 2025.0):
            assert_that(float(format_float(value)), is_(value))

    def test_matrix(self):
        text = format_matrix([[1.0, 0.5], [0.25, 0.0]])
        assert_that(text, is_('1.0 0.5; 0.25 0.0'))
        assert_that(parse_matrix(text).tolist(), is_([[1.0, 0.5], [0.25, 0.0]]))
        assert_that(calling(parse_matrix).with_args('1 2; 3'), raises(ValueError))


class TestRoundTrip(unittest.TestCase):

    def test_presets(self):
        for name in preset_names():
            experiment = get_preset(name)
            text = emit_config(experiment)
            parsed = parse_config(text)
            assert_that(emit_config(parsed), is_(text))
            assert_that(parsed.name, is_(name))
            assert_that(parsed.train, is_(experiment.train))
            assert_that(parsed.groups, is_(experiment.groups))
            assert_that(parsed.game.cost.kernel, is_(experiment.game.cost.kernel))
            assert_that(parsed.game.intensities.tolist(),
                        is_(experiment.game.intensities.tolist()))

    def test_smoothed_indicator(self):
        game = crowd_game(SmoothedIndicator(0.5, 0.1, 8, 2), 1.0, 2.0, np.zeros((4, 2)))
        experiment = Experiment('indicator', game, TrainConfig(iterations=3, clip=1.5))
        text = emit_config(experiment)
        assert_that(text, contains_string('type = smoothed-indicator'))
        parsed = parse_config(text)
        assert_that(parsed.game.cost.kernel, is_(SmoothedIndicator(0.5, 0.1, 8, 2)))
        assert_that(parsed.train.clip, is_(1.5))
        assert_that(emit_config(parsed), is_(text))

    def test_shared_coefficients(self):
        text = lqr_text().replace('drift.0 = ', 'drift = ')
        assert_that(parse_config(text).game.drift[0].constant.tolist(),
                    is_(np.eye(2).tolist()))


class TestFiles(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_write_and_load(self):
        experiment = get_preset('flocking-groups')
        path = write_config(experiment, os.path.join(self.tmpdir, 'experiment.ini'))
        loaded = load_config(path)
        assert_that(loaded.groups, is_(((1, 2), (0, 3))))
        with open(path) as f:
            assert_that(f.read(), is_(emit_config(experiment)))

    def test_missing_file(self):
        assert_that(calling(load_config).with_args(os.path.join(self.tmpdir, 'nope.ini')),
                    raises(ConfigError))


class TestErrors(unittest.TestCase):

    def _rejects(self, text, pattern):
        assert_that(calling(parse_config).with_args(text), raises(ConfigError, pattern))

    def test_malformed(self):
        self._rejects('players = 1\n', 'Malformed')

    def test_missing_setting(self):
        self._rejects(lqr_text().replace('players = 1\n', ''), 'players')

    def test_bad_number(self):
        self._rejects(lqr_text().replace('players = 1\n', 'players = one\n'), 'players')

    def test_unknown_kernel(self):
        self._rejects(lqr_text().replace('type = quadratic', 'type = cubic'), 'cubic')

    def test_other_cost(self):
        self._rejects(lqr_text().replace('type = crowd', 'type = callback'), 'crowd')

    def test_invalid_game(self):
        self._rejects(lqr_text().replace('control_cap = 1.0', 'control_cap = -1.0'),
                      'Invalid experiment')

    def test_cannot_write(self):
        callback = games.callback_from(games.crowd_cost(2, 2))
        game = games.deterministic_game(2, 2, cost=callback)
        assert_that(calling(emit_config).with_args(Experiment('x', game, TrainConfig())),
                    raises(ConfigError))

        cost = games.crowd_cost(2, 2)
        random_start = GameSpec(2, 2, 2, np.eye(2), np.zeros((2, 1)), np.zeros((2, 0)), (),
                                lambda rng: rng.normal(size=(2, 2)), cost)
        assert_that(calling(emit_config).with_args(Experiment('x', random_start, TrainConfig())),
                    raises(ConfigError))

        moving = GameSpec(2, 2, 2, lambda t: (1.0 + t) * np.eye(2), np.zeros((2, 1)),
                          np.zeros((2, 0)), (), np.zeros((2, 2)), cost)
        assert_that(calling(emit_config).with_args(Experiment('x', moving, TrainConfig())),
                    raises(ConfigError))


if __name__ == '__main__':
    unittest.main()
