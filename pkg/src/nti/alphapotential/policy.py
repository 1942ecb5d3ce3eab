#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
The residual feedforward policy network and its checkpoints.

The network maps ``(t / T, X, Y)`` to the joint action. An affine
input layer lifts the ``1 + 2*N*d`` inputs to ``width`` (by default the
input size plus ten), four residual blocks
``h -> relu(L1(relu(L2(h)))) + h`` follow, and an affine output layer
produces the ``N*k`` actions. There is no final activation.

Inner layers start He-uniform with zero biases; the output layer starts
at zero so the initial policy is the zero control.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

from collections import namedtuple

import numpy as np

from zope.interface import implementer

from .interfaces import DomainError
from .interfaces import IActionSource
from .interfaces import ShapeMismatchError
from .optim import AdamState
from .optim import ScheduleState

__all__ = [
    'PolicyParams',
    'FeedbackPolicy',
    'policy_forward',
    'Checkpoint',
    'save_checkpoint',
    'load_checkpoint',
]

#: The number of residual blocks.
DEFAULT_BLOCKS = 4

#: Extra hidden units beyond the input size.
EXTRA_WIDTH = 10


class PolicyParams(object):
    """
    The weights of the policy network.

    ``layers`` is a list of ``(W, b)`` pairs in evaluation order: the
    input layer, then ``L2`` and ``L1`` of each residual block, then
    the output layer. The flat vector concatenates them in the same
    order, each weight matrix row-major followed by its bias.
    """

    __slots__ = ('n_players', 'state_dim', 'action_dim', 'horizon',
                 'width', 'blocks', 'layers')

    def __init__(self, n_players, state_dim, action_dim, horizon,
                 width=None, blocks=DEFAULT_BLOCKS, layers=None):
        self.n_players = int(n_players)
        self.state_dim = int(state_dim)
        self.action_dim = int(action_dim)
        self.horizon = float(horizon)
        self.width = int(width) if width else self.input_size + EXTRA_WIDTH
        self.blocks = int(blocks)
        if layers is None:
            layers = [(np.zeros(shape), np.zeros(shape[0])) for shape in self.shapes]
        self.layers = [(np.asarray(W, dtype=float), np.asarray(b, dtype=float))
                       for W, b in layers]
        for (W, b), shape in zip(self.layers, self.shapes):
            if W.shape != shape or b.shape != shape[:1]:
                raise ShapeMismatchError("Layer shapes do not match the dimensions")
        if len(self.layers) != len(self.shapes):
            raise ShapeMismatchError("Expected %d layers, got %d"
                                     % (len(self.shapes), len(self.layers)))

    @property
    def input_size(self):
        return 1 + 2 * self.n_players * self.state_dim

    @property
    def output_size(self):
        return self.n_players * self.action_dim

    @property
    def shapes(self):
        shapes = [(self.width, self.input_size)]
        shapes.extend([(self.width, self.width)] * (2 * self.blocks))
        shapes.append((self.output_size, self.width))
        return shapes

    @property
    def size(self):
        "The parameter count."
        return sum(W.size + b.size for W, b in self.layers)

    @classmethod
    def for_game(cls, game, grid, seed, width=None, blocks=DEFAULT_BLOCKS):
        """
        Deterministically initialize a network for *game* from *seed*.
        """
        return cls.initialized(game.n_players, game.state_dim, game.action_dim,
                               grid.horizon, seed, width, blocks)

    @classmethod
    def initialized(cls, n_players, state_dim, action_dim, horizon, seed,
                    width=None, blocks=DEFAULT_BLOCKS):
        """
        A network with He-uniform inner layers drawn from *seed* and a
        zero output layer.
        """
        params = cls(n_players, state_dim, action_dim, horizon, width, blocks)
        rng = np.random.default_rng(seed)
        layers = []
        for W, b in params.layers[:-1]:
            bound = np.sqrt(6.0 / W.shape[1])
            layers.append((rng.uniform(-bound, bound, W.shape), b))
        layers.append(params.layers[-1])
        params.layers = layers
        return params

    def flat(self):
        return np.concatenate([np.concatenate([W.ravel(), b]) for W, b in self.layers])

    def with_flat(self, vector):
        """
        A copy holding the parameters in the flat *vector*.
        """
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.size,):
            raise ShapeMismatchError("Expected %d parameters, got shape %s"
                                     % (self.size, vector.shape))
        layers = []
        offset = 0
        for shape in self.shapes:
            count = shape[0] * shape[1]
            W = vector[offset:offset + count].reshape(shape)
            offset += count
            b = vector[offset:offset + shape[0]]
            offset += shape[0]
            layers.append((W.copy(), b.copy()))
        return PolicyParams(self.n_players, self.state_dim, self.action_dim,
                            self.horizon, self.width, self.blocks, layers)

    def bind(self, tape):
        """
        Register every weight as a parameter of *tape*, in flat order.
        """
        bound = []
        for W, b in self.layers:
            bound.append((tape.parameter(W), tape.parameter(b)))
        return _BoundParams(self, tape, bound)

    def is_finite(self):
        return all(np.all(np.isfinite(W)) and np.all(np.isfinite(b)) for W, b in self.layers)

    def __eq__(self, other):
        return (isinstance(other, PolicyParams)
                and self.dims == other.dims
                and np.array_equal(self.flat(), other.flat()))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    @property
    def dims(self):
        return (self.n_players, self.state_dim, self.action_dim, self.width, self.blocks)

    def __repr__(self):
        return '<%s N=%d d=%d k=%d width=%d blocks=%d parameters=%d>' % (
            (type(self).__name__,) + self.dims + (self.size,))


class _BoundParams(object):

    __slots__ = ('params', 'tape', 'layers')

    def __init__(self, params, tape, layers):
        self.params = params
        self.tape = tape
        self.layers = layers

    @property
    def horizon(self):
        return self.params.horizon


class _ArrayOps(object):
    # The tape's forward arithmetic, without recording.

    @staticmethod
    def constant(value):
        return np.asarray(value, dtype=float)

    @staticmethod
    def concat(parts, axis=-1):
        return np.concatenate(parts, axis=axis)

    @staticmethod
    def matvec(x, W):
        return x @ W.T

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def relu(a):
        return np.maximum(a, 0.0)

_ARRAY_OPS = _ArrayOps()


def policy_forward(params, t, x, y, tape=None):
    """
    Evaluate the network at time *t* on the batched joint states *x*
    and sensitivities *y* (``[M, N*d]``).

    Without a *tape* the inputs are arrays and so is the result. With a
    tape, *x* and *y* are variables recorded on it and *params* is
    either the result of :meth:`PolicyParams.bind` or a
    :class:`PolicyParams` to be bound now; the result is a variable.

    :raises DomainError: If the parameters or inputs are not finite.
    """
    if tape is None:
        ops = _ARRAY_OPS
        layers = params.layers
        if not params.is_finite():
            raise DomainError("Policy parameters are not finite")
        rows = np.shape(x)[0]
    else:
        ops = tape
        if isinstance(params, PolicyParams):
            params = params.bind(tape)
        layers = params.layers
        rows = x.shape[0]
    values = (x, y) if tape is None else (x.value, y.value)
    if not all(np.all(np.isfinite(v)) for v in values):
        raise DomainError("Policy inputs are not finite")

    clock = ops.constant(np.full((rows, 1), t / params.horizon))
    h = ops.concat([clock, x, y])
    W, b = layers[0]
    h = ops.add(ops.matvec(h, W), b)
    for block in range(len(layers) // 2 - 1):
        W2, b2 = layers[1 + 2 * block]
        W1, b1 = layers[2 + 2 * block]
        inner = ops.relu(ops.add(ops.matvec(h, W2), b2))
        inner = ops.relu(ops.add(ops.matvec(inner, W1), b1))
        h = ops.add(inner, h)
    W, b = layers[-1]
    return ops.add(ops.matvec(h, W), b)


@implementer(IActionSource)
class FeedbackPolicy(object):
    """
    The action source given by a :class:`PolicyParams`.
    """

    def __init__(self, params):
        self.params = params

    def actions(self, t, x, y):
        return policy_forward(self.params, t, np.asarray(x, dtype=float),
                              np.asarray(y, dtype=float))

    def __repr__(self):
        return '<%s %r>' % (type(self).__name__, self.params)


Checkpoint = namedtuple('Checkpoint', 'params adam schedule iteration')


def save_checkpoint(path, params, adam=None, schedule=None, iteration=0):
    """
    Write *params* (and optionally the optimizer and schedule state
    needed to resume) to *path* as an ``npz`` archive with a dimensions
    header and the flat parameter vector.
    """
    arrays = {
        'dims': np.array(params.dims, dtype=np.int64),
        'horizon': np.array(params.horizon),
        'flat': params.flat(),
        'iteration': np.array(iteration, dtype=np.int64),
    }
    if adam is not None:
        arrays['adam_first'] = adam.first
        arrays['adam_second'] = adam.second
        arrays['adam_step'] = np.array(adam.step, dtype=np.int64)
        arrays['learning_rate'] = np.array(adam.learning_rate)
    if schedule is not None:
        arrays['schedule'] = np.array([schedule.learning_rate, schedule.best,
                                       schedule.bad_iterations])
    with open(path, 'wb') as f:
        np.savez(f, **arrays)
    return path


def load_checkpoint(path):
    """
    Read a checkpoint written by :func:`save_checkpoint`.

    :rtype: Checkpoint
    """
    with np.load(path) as data:
        N, d, k, width, blocks = (int(v) for v in data['dims'])
        template = PolicyParams(N, d, k, float(data['horizon']), width, blocks)
        params = template.with_flat(data['flat'])
        adam = None
        if 'adam_first' in data:
            adam = AdamState(data['adam_first'], data['adam_second'],
                             int(data['adam_step']), float(data['learning_rate']))
        schedule = None
        if 'schedule' in data:
            rate, best, bad = data['schedule'].tolist()
            schedule = ScheduleState(rate, best, int(bad))
        return Checkpoint(params, adam, schedule, int(data['iteration']))
