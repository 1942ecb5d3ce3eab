#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Reading and writing experiments as INI files.

An experiment file has the sections ``[game]``, ``[dynamics]``,
``[jumps]``, ``[cost]``, ``[kernel]`` and ``[train]``. Vectors are
space separated; matrices are written row by row with ``;`` between
rows. Floats use their shortest round-trip representation, so writing
a parsed file reproduces it byte for byte.

Only constant coefficients and crowd costs can be written.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import configparser
import io

import numpy as np

from .game import CrowdCost
from .game import GameSpec
from .interfaces import ConfigError
from .interfaces import DomainError
from .kernels import Gaussian
from .kernels import Quadratic
from .kernels import SmoothedIndicator
from .loop import TrainConfig

__all__ = [
    'Experiment',
    'setting',
    'format_float',
    'format_vector',
    'format_matrix',
    'parse_vector',
    'parse_matrix',
    'emit_config',
    'parse_config',
    'load_config',
    'write_config',
]

_MISSING = object()

#: TrainConfig settings stored in ``[train]``, with their converters.
#: The grid lives in ``[dynamics]``; paths are given on the command line.
_TRAIN_SETTINGS = (
    ('iterations', int),
    ('batch', int),
    ('eval_batch', int),
    ('validation_batch', int),
    ('learning_rate', float),
    ('patience', int),
    ('factor', float),
    ('threshold', float),
    ('min_rate', float),
    ('seed', int),
    ('quadrature_nodes', int),
    ('fixed_noise', 'bool'),
    ('clip', 'optional float'),
    ('checkpoint_every', int),
    ('width', 'optional int'),
    ('blocks', int),
)


class Experiment(object):
    """
    A game with the settings to train it.

    .. attribute:: groups

       Optional tuples of zero-based players that the figures summarize
       as groups.
    """

    def __init__(self, name, game, train, groups=None):
        self.name = name
        self.game = game
        self.train = train
        self.groups = tuple(tuple(int(p) for p in g) for g in groups) if groups else None

    @property
    def grid(self):
        return self.train.grid

    def replace_train(self, **kwargs):
        return Experiment(self.name, self.game, self.train.replace(**kwargs), self.groups)

    def __repr__(self):
        return '<%s %r %r>' % (type(self).__name__, self.name, self.game)


def format_float(value):
    return repr(float(value))


def format_vector(values):
    return ' '.join(format_float(v) for v in np.ravel(values))


def format_matrix(values):
    return '; '.join(format_vector(row) for row in np.atleast_2d(values))


def parse_vector(text):
    text = text.strip()
    if not text:
        return np.zeros(0)
    return np.array([float(v) for v in text.split()])


def parse_matrix(text):
    rows = [parse_vector(row) for row in text.split(';')]
    if len(set(len(row) for row in rows)) != 1:
        raise ValueError("Matrix rows have different lengths")
    return np.array(rows)


def _format_bool(value):
    return 'true' if value else 'false'


def _parse_bool(text):
    text = text.strip().lower()
    if text not in ('true', 'false'):
        raise ValueError("Expected true or false")
    return text == 'true'


def _format_groups(groups):
    return '; '.join(' '.join(str(p) for p in group) for group in groups)


def _parse_groups(text):
    return tuple(tuple(int(p) for p in group.split()) for group in text.split(';'))


def _optional(converter):
    def convert(text):
        if text.strip().lower() == 'none':
            return None
        return converter(text)
    return convert


_CONVERTERS = {
    'bool': _parse_bool,
    'optional float': _optional(float),
    'optional int': _optional(int),
}


def setting(parser, section, name, converter=str, default=_MISSING):
    """
    Look up *name* in *section* of *parser* and convert it.

    :keyword default: Returned if the setting is absent; without one,
        an absent setting is an error.
    :raises ConfigError: Naming the setting if it is missing or cannot
        be converted.
    """
    try:
        raw = parser.get(section, name)
    except (configparser.NoSectionError, configparser.NoOptionError):
        if default is _MISSING:
            raise ConfigError("Missing setting %s in [%s]" % (name, section))
        return default
    try:
        return converter(raw)
    except (ValueError, TypeError, DomainError) as e:
        raise ConfigError("Invalid value for %s in [%s]: %r (%s)" % (name, section, raw, e))


def _constant(coefficient):
    if not coefficient.is_constant:
        raise ConfigError("Time-dependent %s cannot be written" % (coefficient,))
    return coefficient.constant


def _kernel_section(kernel):
    if isinstance(kernel, Gaussian):
        return {'type': 'gaussian',
                'amplitude': format_float(kernel.amplitude),
                'rate': format_float(kernel.rate)}
    if isinstance(kernel, Quadratic):
        return {'type': 'quadratic'}
    if isinstance(kernel, SmoothedIndicator):
        return {'type': 'smoothed-indicator',
                'radius': format_float(kernel.radius),
                'width': format_float(kernel.width),
                'nodes': str(kernel.nodes),
                'dim': str(kernel.dim)}
    raise ConfigError("Kernel %r cannot be written" % (kernel,))


def _train_value(value, converter):
    if converter == 'bool':
        return _format_bool(value)
    if value is None:
        return 'none'
    if converter in (float, 'optional float'):
        return format_float(value)
    return str(int(value))


def emit_config(experiment):
    """
    The INI text of *experiment*.

    :raises ConfigError: If the game has time-dependent coefficients, a
        random initial state, or a cost other than a crowd cost.
    """
    game = experiment.game
    train = experiment.train
    cost = game.cost
    if not isinstance(cost, CrowdCost):
        raise ConfigError("Only crowd costs can be written, not %r" % (cost,))
    if game.initial_states is None:
        raise ConfigError("Random initial states cannot be written")
    N = game.n_players

    parser = configparser.ConfigParser(interpolation=None)
    parser['game'] = {
        'name': experiment.name,
        'players': str(N),
        'state_dim': str(game.state_dim),
        'action_dim': str(game.action_dim),
        'control_cap': format_float(game.control_cap),
        'initial_states': format_matrix(game.initial_states),
    }
    if experiment.groups:
        parser['game']['groups'] = _format_groups(experiment.groups)

    dynamics = {
        'horizon': format_float(train.horizon),
        'steps': str(int(train.steps)),
        'noise_dim': str(game.noise_dim),
    }
    for i in range(N):
        dynamics['drift.%d' % i] = format_matrix(_constant(game.drift[i]))
    for i in range(N):
        dynamics['diffusion.%d' % i] = format_matrix(_constant(game.diffusion[i]))
    parser['dynamics'] = dynamics

    jumps = {'intensities': format_vector(game.intensities)}
    if game.jump_sources:
        for i in range(N):
            jumps['loadings.%d' % i] = format_matrix(_constant(game.jump_loadings[i]))
    parser['jumps'] = jumps

    parser['cost'] = {
        'type': 'crowd',
        'control_weights': format_vector(cost.control_weights),
        'terminal_weights': format_vector(cost.terminal_weights),
        'targets': format_matrix(cost.targets),
        'interaction': format_matrix(cost.interaction),
    }
    parser['kernel'] = _kernel_section(cost.kernel)
    parser['train'] = {name: _train_value(getattr(train, name), converter)
                       for name, converter in _TRAIN_SETTINGS}

    out = io.StringIO()
    parser.write(out)
    return out.getvalue()


def _kernel(parser):
    kind = setting(parser, 'kernel', 'type')
    if kind == 'gaussian':
        return Gaussian(setting(parser, 'kernel', 'amplitude', float),
                        setting(parser, 'kernel', 'rate', float))
    if kind == 'quadratic':
        return Quadratic()
    if kind == 'smoothed-indicator':
        return SmoothedIndicator(setting(parser, 'kernel', 'radius', float),
                                 setting(parser, 'kernel', 'width', float),
                                 setting(parser, 'kernel', 'nodes', int, 16),
                                 setting(parser, 'kernel', 'dim', int, 2))
    raise ConfigError("Unknown kernel type %r" % (kind,))


def _per_player(parser, section, name, N):
    shared = setting(parser, section, name, parse_matrix, None)
    if shared is not None:
        return shared
    return [setting(parser, section, '%s.%d' % (name, i), parse_matrix) for i in range(N)]


def parse_config(text, source='<string>'):
    """
    Build an :class:`Experiment` from INI *text*.

    :raises ConfigError: If the text is malformed or describes an
        invalid game.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError("Malformed configuration %s: %s" % (source, e))

    N = setting(parser, 'game', 'players', int)
    d = setting(parser, 'game', 'state_dim', int)
    k = setting(parser, 'game', 'action_dim', int)
    if setting(parser, 'cost', 'type', str, 'crowd') != 'crowd':
        raise ConfigError("Only crowd costs can be configured")

    train = {'horizon': setting(parser, 'dynamics', 'horizon', float, 1.0),
             'steps': setting(parser, 'dynamics', 'steps', int, 50)}
    for name, converter in _TRAIN_SETTINGS:
        train[name] = setting(parser, 'train', name,
                              _CONVERTERS.get(converter, converter),
                              getattr(TrainConfig, name))

    intensities = setting(parser, 'jumps', 'intensities', parse_vector, np.zeros(0))
    loadings = (_per_player(parser, 'jumps', 'loadings', N)
                if len(intensities) else np.zeros((d, 0)))
    try:
        cost = CrowdCost(
            setting(parser, 'cost', 'control_weights', parse_vector),
            _kernel(parser),
            setting(parser, 'cost', 'interaction', parse_matrix),
            setting(parser, 'cost', 'terminal_weights', parse_vector),
            setting(parser, 'cost', 'targets', parse_matrix),
            action_dim=k)
        game = GameSpec(
            N, d, k,
            drift=_per_player(parser, 'dynamics', 'drift', N),
            diffusion=_per_player(parser, 'dynamics', 'diffusion', N),
            jump_loadings=loadings,
            intensities=intensities,
            initial_states=setting(parser, 'game', 'initial_states', parse_matrix),
            cost=cost,
            control_cap=setting(parser, 'game', 'control_cap', float, 1.0),
            noise_dim=setting(parser, 'dynamics', 'noise_dim', int, None))
        config = TrainConfig(**train)
    except DomainError as e:
        raise ConfigError("Invalid experiment %s: %s" % (source, e))
    return Experiment(setting(parser, 'game', 'name', str, 'custom'), game, config,
                      setting(parser, 'game', 'groups', _parse_groups, None))


def load_config(path):
    """
    Read an :class:`Experiment` from the file *path*.
    """
    try:
        with open(path) as f:
            text = f.read()
    except (IOError, OSError) as e:
        raise ConfigError("Cannot read %s: %s" % (path, e))
    return parse_config(text, path)


def write_config(experiment, path):
    with open(path, 'w') as f:
        f.write(emit_config(experiment))
    return path
