#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Mean trajectories, overlay plots and summary statistics of simulated
paths.

The overlay draws each player's mean trajectory over the batch with
markers labeled ``1``, ``2`` and ``3`` at a quarter, half and three
quarters of the horizon. The SVG output depends only on the paths.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import csv
import json
from itertools import combinations

import matplotlib
matplotlib.use('Agg')
from matplotlib.figure import Figure # pylint:disable=wrong-import-position
import numpy as np # pylint:disable=wrong-import-position

from .interfaces import ShapeMismatchError # pylint:disable=wrong-import-position

__all__ = [
    'MARKER_FRACTIONS',
    'SUMMARY_FRACTIONS',
    'mean_trajectory',
    'node_at',
    'pairwise_distance',
    'group_distances',
    'summarize',
    'write_mean_csv',
    'write_summary',
    'plot_overlay',
]

#: Fractions of the horizon marked on the overlay.
MARKER_FRACTIONS = (0.25, 0.5, 0.75)
#: Fractions of the horizon reported in the summary.
SUMMARY_FRACTIONS = (0.25, 0.5, 0.75, 1.0)

_SVG_SALT = 'nti.alphapotential'


def mean_trajectory(paths, n_players):
    """
    The batch mean of the states, ``[P+1, N, d]``.
    """
    X = paths.X
    if X.shape[2] % n_players:
        raise ShapeMismatchError("State size %d is not a multiple of %d players"
                                 % (X.shape[2], n_players))
    mean = X.mean(axis=0)
    return mean.reshape(mean.shape[0], n_players, -1)


def node_at(grid, fraction):
    "The grid node nearest to ``fraction * T``."
    return int(round(fraction * grid.steps))


def pairwise_distance(positions):
    """
    The mean distance between the rows of *positions* ``[N, d]``;
    zero for a single player.
    """
    pairs = list(combinations(range(len(positions)), 2))
    if not pairs:
        return 0.0
    return float(np.mean([np.linalg.norm(positions[i] - positions[j]) for i, j in pairs]))


def group_distances(positions, groups):
    """
    The mean distance between players of the same group and between
    players of different groups.

    :return: ``(within, cross)``; either is None without such pairs.
    """
    label = {}
    for g, group in enumerate(groups):
        for player in group:
            label[player] = g
    within = []
    cross = []
    for i, j in combinations(sorted(label), 2):
        distance = np.linalg.norm(positions[i] - positions[j])
        (within if label[i] == label[j] else cross).append(distance)
    return (float(np.mean(within)) if within else None,
            float(np.mean(cross)) if cross else None)


def summarize(paths, n_players, groups=None):
    """
    Summary statistics of the mean trajectories of *paths*.

    Distances are between the players' mean positions.
    """
    means = mean_trajectory(paths, n_players)
    grid = paths.grid
    result = {
        'trajectories': paths.size,
        'terminal_means': means[-1].tolist(),
        'pairwise_distance': {},
    }
    if groups:
        result['groups'] = [list(g) for g in groups]
        result['within_group_distance'] = {}
        result['cross_group_distance'] = {}
    for fraction in SUMMARY_FRACTIONS:
        key = repr(fraction)
        positions = means[node_at(grid, fraction)]
        result['pairwise_distance'][key] = pairwise_distance(positions)
        if groups:
            within, cross = group_distances(positions, groups)
            result['within_group_distance'][key] = within
            result['cross_group_distance'][key] = cross
    return result


def write_summary(summary, path):
    with open(path, 'w') as f:
        json.dump(summary, f, sort_keys=True, indent=2)
        f.write('\n')
    return path


def write_mean_csv(paths, n_players, stream):
    """
    Write the mean trajectory to the text *stream*: one row per grid
    node with columns ``step``, ``t`` and ``p<i>_x<c>``.
    """
    means = mean_trajectory(paths, n_players)
    dim = means.shape[2]
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['step', 't'] + ['p%d_x%d' % (i, c)
                                     for i in range(n_players) for c in range(dim)])
    for step, t in enumerate(paths.grid.nodes):
        writer.writerow([step, repr(float(t))] + [repr(v) for v in means[step].ravel().tolist()])


def _coordinates(track, times):
    # Planar states plot directly; otherwise the first coordinate
    # against time.
    if track.shape[1] >= 2:
        return track[:, 0], track[:, 1]
    return times, track[:, 0]


def plot_overlay(paths, n_players, path, targets=None, title=None):
    """
    Write an SVG of the players' mean trajectories to *path*.

    :keyword targets: Optional ``[N, d]`` targets drawn as crosses.
    """
    means = mean_trajectory(paths, n_players)
    grid = paths.grid
    times = grid.nodes
    planar = means.shape[2] >= 2

    figure = Figure(figsize=(6, 6))
    axes = figure.add_subplot(1, 1, 1)
    for i in range(n_players):
        xs, ys = _coordinates(means[:, i], times)
        line, = axes.plot(xs, ys, label='player %d' % (i + 1))
        for label, fraction in enumerate(MARKER_FRACTIONS, 1):
            node = node_at(grid, fraction)
            axes.plot([xs[node]], [ys[node]], 'o', color=line.get_color(), markersize=4)
            axes.annotate(str(label), (xs[node], ys[node]),
                          textcoords='offset points', xytext=(4, 4), fontsize=8)
        if targets is not None and planar:
            axes.plot([targets[i][0]], [targets[i][1]], 'x', color=line.get_color())
    axes.set_xlabel('$x_1$' if planar else '$t$')
    axes.set_ylabel('$x_2$' if planar else '$x_1$')
    if title:
        axes.set_title(title)
    axes.legend(loc='best', fontsize=8)

    with matplotlib.rc_context({'svg.hashsalt': _SVG_SALT, 'svg.fonttype': 'none'}):
        figure.savefig(path, format='svg', metadata={'Date': None})
    logger.debug("Wrote overlay of %d players to %s", n_players, path)
    return path
