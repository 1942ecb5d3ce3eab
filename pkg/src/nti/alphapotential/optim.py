#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
The Adam optimizer and the plateau learning-rate schedule.

Both are pure: :func:`adam_step` and :meth:`PlateauSchedule.observe`
return new state objects rather than mutating, so that the training
loop can apply them only when an iteration commits.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import numpy as np

from .interfaces import DomainError
from .interfaces import ShapeMismatchError

__all__ = [
    'AdamState',
    'adam_step',
    'PlateauSchedule',
    'ScheduleState',
    'plateau_schedule',
    'clip_norm',
]


class AdamState(object):
    """
    The moments and step counter of Adam.
    """

    __slots__ = ('first', 'second', 'step', 'learning_rate',
                 'beta1', 'beta2', 'epsilon')

    def __init__(self, first, second, step=0, learning_rate=1e-3,
                 beta1=0.9, beta2=0.999, epsilon=1e-8):
        first = np.asarray(first, dtype=float)
        second = np.asarray(second, dtype=float)
        if first.shape != second.shape:
            raise ShapeMismatchError("Adam moments must have the same shape")
        if step < 0:
            raise DomainError("The step counter cannot be negative")
        if not learning_rate > 0:
            raise DomainError("The learning rate must be positive, not %r" % (learning_rate,))
        self.first = first
        self.second = second
        self.step = int(step)
        self.learning_rate = float(learning_rate)
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon

    @classmethod
    def zeros(cls, size, learning_rate=1e-3, **kwargs):
        return cls(np.zeros(size), np.zeros(size), 0, learning_rate, **kwargs)

    def with_learning_rate(self, learning_rate):
        return AdamState(self.first, self.second, self.step, learning_rate,
                         self.beta1, self.beta2, self.epsilon)

    def __eq__(self, other):
        return (isinstance(other, AdamState)
                and self.step == other.step
                and self.learning_rate == other.learning_rate
                and np.array_equal(self.first, other.first)
                and np.array_equal(self.second, other.second))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return '<%s step=%d lr=%r>' % (type(self).__name__, self.step, self.learning_rate)


def adam_step(params, grads, state):
    """
    One bias-corrected Adam update.

    :return: ``(new_params, new_state)``; the inputs are not modified.
    """
    params = np.asarray(params, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if params.shape != grads.shape or params.shape != state.first.shape:
        raise ShapeMismatchError("Parameters %s, gradients %s and moments %s disagree"
                                 % (params.shape, grads.shape, state.first.shape))
    step = state.step + 1
    first = state.beta1 * state.first + (1.0 - state.beta1) * grads
    second = state.beta2 * state.second + (1.0 - state.beta2) * (grads * grads)
    first_hat = first / (1.0 - state.beta1 ** step)
    second_hat = second / (1.0 - state.beta2 ** step)
    update = state.learning_rate * first_hat / (np.sqrt(second_hat) + state.epsilon)
    new_state = AdamState(first, second, step, state.learning_rate,
                          state.beta1, state.beta2, state.epsilon)
    return params - update, new_state


class ScheduleState(object):
    """
    The best value seen so far and the count of iterations since it
    last improved.
    """

    __slots__ = ('best', 'bad_iterations', 'learning_rate')

    def __init__(self, learning_rate, best=float('inf'), bad_iterations=0):
        self.learning_rate = float(learning_rate)
        self.best = float(best)
        self.bad_iterations = int(bad_iterations)

    def __eq__(self, other):
        return (isinstance(other, ScheduleState)
                and (self.best, self.bad_iterations, self.learning_rate)
                == (other.best, other.bad_iterations, other.learning_rate))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return '<%s lr=%r best=%r bad=%d>' % (
            type(self).__name__, self.learning_rate, self.best, self.bad_iterations)


class PlateauSchedule(object):
    """
    Reduce the learning rate when the loss stops improving.

    A value improves on the best when it is below
    ``best - threshold * |best|``. After *patience* consecutive
    iterations without improvement the rate is multiplied by *factor*,
    never going below *min_rate*, and the count starts over.
    """

    def __init__(self, patience=10, factor=0.5, threshold=1e-4, min_rate=1e-5):
        if not 0 < factor < 1:
            raise DomainError("The reduction factor must lie in (0, 1), not %r" % (factor,))
        if patience < 1:
            raise DomainError("Patience must be at least one iteration")
        self.patience = int(patience)
        self.factor = float(factor)
        self.threshold = float(threshold)
        self.min_rate = float(min_rate)

    def initial(self, learning_rate):
        return ScheduleState(learning_rate)

    def observe(self, state, value):
        """
        Account for the loss *value* of one iteration.

        :return: The new :class:`ScheduleState`.
        """
        value = float(value)
        best = state.best
        bar = best - self.threshold * abs(best) if np.isfinite(best) else best
        if value < bar:
            return ScheduleState(state.learning_rate, value, 0)
        bad = state.bad_iterations + 1
        rate = state.learning_rate
        if bad >= self.patience:
            rate = max(rate * self.factor, self.min_rate)
            bad = 0
        return ScheduleState(rate, state.best, bad)

    def __repr__(self):
        return '%s(patience=%r, factor=%r, threshold=%r, min_rate=%r)' % (
            type(self).__name__, self.patience, self.factor, self.threshold, self.min_rate)


def plateau_schedule(history, state, schedule=None):
    """
    Feed the loss values in *history* to *schedule* (by default a
    :class:`PlateauSchedule` with default settings) starting from
    *state*, and return the resulting learning rate.
    """
    schedule = schedule or PlateauSchedule()
    for value in history:
        state = schedule.observe(state, value)
    return state.learning_rate


def clip_norm(grads, max_norm):
    """
    Rescale *grads* so their Euclidean norm is at most *max_norm*. A
    *max_norm* of None leaves them alone.
    """
    if max_norm is None:
        return grads
    norm = float(np.linalg.norm(grads))
    if norm > max_norm:
        logger.debug("Clipping gradient norm %s to %s", norm, max_norm)
        return grads * (max_norm / norm)
    return grads
