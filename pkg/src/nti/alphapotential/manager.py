#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Data managers that apply the effects of a training iteration.

A training iteration only *computes*: the noise, the rollout, the
potential and its gradient, and the optimizer's proposal. Everything
that changes state (the parameters, the optimizer moments, the
schedule, the log, checkpoint files) is registered with the
iteration's transaction through :func:`on_commit` and
:func:`on_commit_near_end`, and happens in ``tpc_finish``. If the
transaction aborts, nothing changes.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

from zope import interface

from transaction.interfaces import IDataManagerSavepoint
from transaction.interfaces import ISavepointDataManager

__all__ = [
    'CommitAction',
    'NearEndCommitAction',
    'on_commit',
    'on_commit_near_end',
]


@interface.implementer(ISavepointDataManager, IDataManagerSavepoint)
class CommitAction(object):
    """
    A :class:`transaction.interfaces.IDataManager` that calls *call*
    when the transaction finishes successfully, after every joined
    manager has voted.

    Actions that share a *target* run in the order they joined; see
    :meth:`sortKey`. The optional *vote* callable runs in the voting
    phase and may raise to abort the whole iteration.

    The action does no work before ``tpc_finish``, so savepoints and
    rollbacks are trivial.
    """

    _EMPTY_KWARGS = {}

    def __init__(self, transaction_manager, call, target=None, vote=None,
                 args=(), kwargs=None):
        self.transaction_manager = transaction_manager
        self.callable = call
        self.target = target
        self.vote = vote
        self.args = args
        self.kwargs = kwargs or self._EMPTY_KWARGS

    def commit(self, tx):
        pass

    def abort(self, tx):
        pass

    def sortKey(self):
        """
        The id of the target, or of the callable. :meth:`list.sort` is
        stable, so actions with the same key keep their relative order.
        """
        return str(id(self.target) if self.target is not None else id(self.callable))

    def beforeCompletion(self, tx):
        "Does nothing"

    afterCompletion = beforeCompletion

    def tpc_begin(self, tx, subtransaction=False): # pylint:disable=unused-argument
        assert not subtransaction

    def tpc_vote(self, tx): # pylint:disable=unused-argument
        if self.vote is not None:
            self.vote()

    def tpc_finish(self, tx): # pylint:disable=unused-argument
        self.callable(*self.args, **self.kwargs)

    tpc_abort = abort

    def savepoint(self):
        return self

    def rollback(self):
        "Nothing was done yet, so there is nothing to roll back."

    def __repr__(self):
        return '<%s.%s at %s for %r>' % (type(self).__module__, type(self).__name__,
                                         id(self), self.callable)


class NearEndCommitAction(CommitAction):
    """
    A :class:`CommitAction` that sorts after the others, for actions
    (like writing a checkpoint) that read state the others update.
    """

    def sortKey(self):
        parent_key = super(NearEndCommitAction, self).sortKey()
        sort_str = str(self.target) if self.target is not None else str(self.callable)
        return 'zzz%s:%s' % (sort_str, parent_key)


def on_commit(transaction_manager, call, *args, **kwargs):
    """
    Join a :class:`CommitAction` calling ``call(*args)`` to the current
    transaction of *transaction_manager*.

    :keyword target: Passed to the action; see :meth:`CommitAction.sortKey`.
    :keyword vote: A callable run in the voting phase.
    """
    klass = kwargs.pop('action_class', CommitAction)
    action = klass(transaction_manager, call,
                   target=kwargs.pop('target', None),
                   vote=kwargs.pop('vote', None),
                   args=args, kwargs=kwargs)
    transaction_manager.get().join(action)
    return action


def on_commit_near_end(transaction_manager, call, *args, **kwargs):
    """
    Like :func:`on_commit`, but the action runs after the others.
    """
    kwargs['action_class'] = NearEndCommitAction
    return on_commit(transaction_manager, call, *args, **kwargs)
