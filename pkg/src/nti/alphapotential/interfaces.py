#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Interfaces, exceptions and events for nti.alphapotential.

"""

from __future__ import print_function, absolute_import, division

from zope.interface import Interface
from zope.interface import Attribute
from zope.interface import implementer

# pylint:disable=no-method-argument,inherit-non-class
# pylint:disable=too-many-ancestors

__all__ = [
    # Interfaces
    'IKernel',
    'ICostDescriptor',
    'IActionSource',
    'ITrainingEvent',
    'IWillRunIteration',
    'IIterationCommitted',
    'ILearningRateReduced',
    'ITrainingAborted',
    # Exceptions
    'AlphaPotentialError',
    'DomainError',
    'GameSpecError',
    'ShapeMismatchError',
    'SymmetryViolation',
    'NonFiniteActionError',
    'NonFiniteLossError',
    'TapeError',
    'ConfigError',
    'UnknownPresetError',
    # Events
    'TrainingEvent',
    'WillRunIteration',
    'IterationCommitted',
    'LearningRateReduced',
    'TrainingAborted',
]


class IKernel(Interface):
    """
    A pairwise interaction kernel :math:`K: R^d \\to R`.

    All evaluation methods are batched: the trailing axis of *z*
    is the spatial dimension, any leading axes are carried through.
    """

    curvature = Attribute(
        "The supremum over z of the spectral norm of the Hessian of K.")

    def evaluate(z):
        """
        Return ``(value, gradient, hessian)`` with shapes
        ``z.shape[:-1]``, ``z.shape`` and ``z.shape + (d,)``.

        :raises DomainError: If *z* is not finite.
        """

    def hessian_vector(z, v):
        """
        Return the product of the Hessian at *z* with *v*, batched
        over the leading axes.
        """


class ICostDescriptor(Interface):
    """
    The running costs :math:`f_i(t, x, a)` and terminal costs
    :math:`g_i(x)` of all players of a distributed game.

    States are flat arrays of shape ``[..., N*d]`` and actions
    ``[..., N*k]``; "own gradients" stack, player by player, the
    derivative of player *i*'s cost with respect to player *i*'s own
    coordinates.
    """

    n_players = Attribute("The number of players N.")
    state_dim = Attribute("The per-player state dimension d.")
    action_dim = Attribute("The per-player action dimension k.")

    def running_value(t, x, a):
        "All running costs, shape ``[..., N]``."

    def terminal_value(x):
        "All terminal costs, shape ``[..., N]``."

    def running_gradient(t, x, a):
        """
        Return ``(gx, ga)``: the own gradients
        :math:`\\partial_{x_i} f_i` stacked to ``[..., N*d]`` and
        :math:`\\partial_{a_i} f_i` stacked to ``[..., N*k]``.
        """

    def running_gradient_vjp(t, x, a, gx_bar, ga_bar):
        """
        Vector-Jacobian product of :meth:`running_gradient`: return
        ``(x_bar, a_bar)``.
        """

    def terminal_gradient(x):
        "Own gradients of the terminal costs, ``[..., N*d]``."

    def terminal_gradient_vjp(x, g_bar):
        "Vector-Jacobian product of :meth:`terminal_gradient`."

    def running_value_gradient(t, x, a, i):
        """
        Full gradient of player *i*'s running cost with respect to the
        joint state and joint action: ``(x_bar, a_bar)``.
        """

    def terminal_value_gradient(x, i):
        "Full gradient of player *i*'s terminal cost, ``[..., N*d]``."

    def running_cross_hessian(t, x, a, i, j):
        """
        The mixed second derivatives of :math:`f_i` with respect to
        player *i*'s and player *j*'s coordinates, as a mapping with
        keys ``'xx'`` (d×d), ``'xa'`` (d×k), ``'ax'`` (k×d) and
        ``'aa'`` (k×k), each batched over the leading axes. *t* is a
        float or an array of the batch shape.
        """

    def terminal_cross_hessian(x, i, j):
        "The d×d mixed second derivative of :math:`g_i`."

    def running_rule(rule):
        """
        Return the quadrature rule to use for r-integrals of the
        running own gradients. Costs whose own gradients are affine
        return the exact one-node midpoint rule.
        """

    def terminal_rule(rule):
        "Like :meth:`running_rule`, for the terminal own gradients."

    def check_symmetric():
        """
        Verify that the cross second derivatives of :math:`f_i` and
        :math:`f_j` agree for every pair.

        :raises SymmetryViolation: Naming the first offending pair.
        """


class IActionSource(Interface):
    """
    Something that produces joint actions for the simulator.
    """

    def actions(t, x, y):
        """
        Given the time *t* and batched joint states and sensitivities
        of shape ``[M, N*d]``, return joint actions ``[M, N*k]``.
        """

###
# Exceptions
###

class AlphaPotentialError(Exception):
    """
    Base class for errors raised by this package.
    """

class DomainError(AlphaPotentialError, ValueError):
    """
    An input is non-finite or outside the domain of an operation.
    """

class GameSpecError(DomainError):
    """
    A game specification is inconsistent: mismatched dimensions,
    invalid jump intensities, coefficients that are not square
    integrable on the horizon, or a non-positive control cap.
    """

class ShapeMismatchError(DomainError):
    """
    An array does not have the shape the game requires.
    """

class SymmetryViolation(DomainError):
    """
    The cost does not satisfy the symmetry condition required for an
    exact potential. The ``pair`` attribute holds the offending
    ``(i, j)``, zero-based.
    """

    def __init__(self, pair, message=None):
        self.pair = tuple(pair)
        DomainError.__init__(
            self,
            message or "Cost is not symmetric for players %s and %s" % self.pair
        )

class NonFiniteActionError(AlphaPotentialError, ArithmeticError):
    """
    An action source produced a non-finite action. The ``step`` and
    ``trajectory`` attributes locate the first bad value.
    """

    checkpoint = None

    def __init__(self, step, trajectory):
        self.step = step
        self.trajectory = trajectory
        AlphaPotentialError.__init__(
            self,
            "Non-finite action at step %s of trajectory %s" % (step, trajectory)
        )

class NonFiniteLossError(AlphaPotentialError, ArithmeticError):
    """
    The training loss or its gradient is not finite.

    ``iteration`` is the iteration that failed. ``checkpoint`` is
    the path of the checkpoint holding the last committed parameters,
    once one has been written.
    """

    checkpoint = None

    def __init__(self, iteration, what='loss'):
        self.iteration = iteration
        self.what = what
        AlphaPotentialError.__init__(
            self,
            "Non-finite %s at iteration %s" % (what, iteration)
        )

class TapeError(AlphaPotentialError):
    """
    A reverse-mode request that cannot be satisfied: the output is not
    recorded on the tape, or it is not a scalar.
    """

class ConfigError(AlphaPotentialError):
    """
    A configuration file is malformed.
    """

class UnknownPresetError(ConfigError, KeyError):
    """
    No preset exists with the requested name.
    """

    def __str__(self):
        return Exception.__str__(self)

###
# Events
###

class ITrainingEvent(Interface):
    """
    Base class for events published by the training loop.
    """
    loop = Attribute("The training loop.")
    iteration = Attribute("The zero-based iteration number.")

class IWillRunIteration(ITrainingEvent):
    """
    A training iteration is about to run in a new transaction.
    """
    learning_rate = Attribute("The learning rate the iteration will use.")

class IIterationCommitted(ITrainingEvent):
    """
    A training iteration committed its update.
    """
    record = Attribute("The TrainLog record appended for the iteration.")

class ILearningRateReduced(ITrainingEvent):
    """
    The plateau schedule reduced the learning rate.
    """
    old_rate = Attribute("The previous rate.")
    new_rate = Attribute("The new rate.")

class ITrainingAborted(ITrainingEvent):
    """
    A training iteration failed and training stopped.
    """
    error = Attribute("The exception.")
    checkpoint = Attribute("Path of the checkpoint written at abort, or None.")


@implementer(ITrainingEvent)
class TrainingEvent(object):
    __slots__ = ('loop', 'iteration')

    def __init__(self, loop, iteration):
        self.loop = loop
        self.iteration = iteration

    def __repr__(self):
        return '<%s iteration=%s>' % (type(self).__name__, self.iteration)

@implementer(IWillRunIteration)
class WillRunIteration(TrainingEvent):
    __slots__ = ('learning_rate',)

    def __init__(self, loop, iteration, learning_rate):
        TrainingEvent.__init__(self, loop, iteration)
        self.learning_rate = learning_rate

@implementer(IIterationCommitted)
class IterationCommitted(TrainingEvent):
    __slots__ = ('record',)

    def __init__(self, loop, iteration, record):
        TrainingEvent.__init__(self, loop, iteration)
        self.record = record

@implementer(ILearningRateReduced)
class LearningRateReduced(TrainingEvent):
    __slots__ = ('old_rate', 'new_rate')

    def __init__(self, loop, iteration, old_rate, new_rate):
        TrainingEvent.__init__(self, loop, iteration)
        self.old_rate = old_rate
        self.new_rate = new_rate

@implementer(ITrainingAborted)
class TrainingAborted(TrainingEvent):
    __slots__ = ('error', 'checkpoint')

    def __init__(self, loop, iteration, error, checkpoint=None):
        TrainingEvent.__init__(self, loop, iteration)
        self.error = error
        self.checkpoint = checkpoint
