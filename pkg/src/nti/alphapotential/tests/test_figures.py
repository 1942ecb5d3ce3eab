#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import print_function, absolute_import, division

import io
import json
import os
import shutil
import tempfile
import unittest

import numpy as np

from hamcrest import assert_that
from hamcrest import is_
from hamcrest import calling
from hamcrest import raises
from hamcrest import has_entries
from hamcrest import contains_string
from hamcrest import starts_with

from nti.testing.matchers import has_length

from ..figures import group_distances
from ..figures import mean_trajectory
from ..figures import node_at
from ..figures import pairwise_distance
from ..figures import plot_overlay
from ..figures import summarize
from ..figures import write_mean_csv
from ..figures import write_summary
from ..interfaces import ShapeMismatchError
from ..simulation import PathBatch

from . import games

#: Mean positions of three planar players: a 3-4-5 triangle.
TRIANGLE = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]])


def triangle_paths(steps=8):
    """
    Two trajectories that sit at ``TRIANGLE + 1`` and ``TRIANGLE - 1``
    at every node, so their mean is ``TRIANGLE``.
    """
    grid = games.grid(steps)
    base = np.tile(TRIANGLE.ravel(), (steps + 1, 1))
    X = np.stack([base + 1.0, base - 1.0])
    actions = np.zeros((2, steps, 6))
    return PathBatch(X, np.zeros_like(X), actions, grid)


def line_paths(steps=8):
    grid = games.grid(steps)
    X = np.zeros((1, steps + 1, 2))
    X[0, :, 0] = grid.nodes
    X[0, :, 1] = 1.0 - grid.nodes
    return PathBatch(X, np.zeros_like(X), np.zeros((1, steps, 2)), grid)


class TestMeans(unittest.TestCase):

    def test_mean_trajectory(self):
        means = mean_trajectory(triangle_paths(), 3)
        assert_that(means.shape, is_((9, 3, 2)))
        assert_that(means[4].tolist(), is_(TRIANGLE.tolist()))

    def test_rejects_players(self):
        assert_that(calling(mean_trajectory).with_args(triangle_paths(), 4),
                    raises(ShapeMismatchError))

    def test_node_at(self):
        grid = games.grid(8)
        assert_that([node_at(grid, f) for f in (0.25, 0.5, 0.75, 1.0)], is_([2, 4, 6, 8]))
        assert_that(node_at(games.grid(50), 0.25), is_(12))


class TestDistances(unittest.TestCase):

    def test_pairwise(self):
        assert_that(pairwise_distance(np.array([[0.0, 0.0], [3.0, 4.0]])), is_(5.0))
        assert_that(pairwise_distance(TRIANGLE), is_(4.0))
        assert_that(pairwise_distance(TRIANGLE[:1]), is_(0.0))

    def test_groups(self):
        assert_that(group_distances(TRIANGLE, ((0, 1), (2,))), is_((3.0, 4.5)))
        assert_that(group_distances(TRIANGLE, ((0,), (1,), (2,))), is_((None, 4.0)))
        assert_that(group_distances(TRIANGLE, ((0, 1, 2),)), is_((4.0, None)))


class TestSummary(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_summarize(self):
        summary = summarize(triangle_paths(), 3)
        assert_that(summary, has_entries(trajectories=2,
                                         terminal_means=TRIANGLE.tolist()))
        assert_that(summary['pairwise_distance'],
                    is_({'0.25': 4.0, '0.5': 4.0, '0.75': 4.0, '1.0': 4.0}))
        assert_that('within_group_distance' in summary, is_(False))

    def test_summarize_groups(self):
        summary = summarize(triangle_paths(), 3, groups=((0, 1), (2,)))
        assert_that(summary, has_entries(groups=[[0, 1], [2]]))
        assert_that(summary['within_group_distance'], has_entries({'1.0': 3.0}))
        assert_that(summary['cross_group_distance'], has_entries({'0.5': 4.5}))

    def test_write_summary(self):
        path = write_summary(summarize(triangle_paths(), 3), os.path.join(self.tmpdir, 's.json'))
        with open(path) as f:
            assert_that(json.load(f), has_entries(trajectories=2))

    def test_mean_csv(self):
        stream = io.StringIO()
        write_mean_csv(line_paths(4), 1, stream)
        lines = stream.getvalue().splitlines()
        assert_that(lines, has_length(6))
        assert_that(lines[0], is_('step,t,p0_x0,p0_x1'))
        assert_that(lines[1], is_('0,0.0,0.0,1.0'))
        assert_that(lines[-1], is_('4,1.0,1.0,0.0'))


class TestOverlay(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def _read(self, name):
        with open(os.path.join(self.tmpdir, name)) as f:
            return f.read()

    def test_deterministic(self):
        paths = triangle_paths()
        for name in ('a.svg', 'b.svg'):
            plot_overlay(paths, 3, os.path.join(self.tmpdir, name),
                         targets=TRIANGLE, title='triangle')
        first = self._read('a.svg')
        assert_that(first, starts_with('<?xml'))
        assert_that(first, contains_string('player 3'))
        assert_that(first, is_(self._read('b.svg')))

    def test_one_dimensional(self):
        grid = games.grid(8)
        X = np.zeros((3, 9, 2))
        X[:, :, 0] = grid.nodes
        X[:, :, 1] = grid.nodes ** 2
        paths = PathBatch(X, np.zeros_like(X), np.zeros((3, 8, 2)), grid)
        path = plot_overlay(paths, 2, os.path.join(self.tmpdir, 'line.svg'))
        assert_that(os.path.exists(path), is_(True))
        assert_that(self._read('line.svg'), contains_string('player 2'))


if __name__ == '__main__':
    unittest.main()
