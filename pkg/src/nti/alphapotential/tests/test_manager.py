#!/usr/bin/env python
# -*- coding: utf-8 -*-

from __future__ import print_function, absolute_import, division

import unittest

from hamcrest import assert_that
from hamcrest import contains
from hamcrest import calling
from hamcrest import raises
from hamcrest import is_

import transaction

from ..manager import on_commit
from ..manager import on_commit_near_end


class TestCommitActions(unittest.TestCase):

    def setUp(self):
        self.txm = transaction.TransactionManager(explicit=True)
        self.results = []

    def tearDown(self):
        if self.txm.isInTransaction():
            self.txm.abort()

    def test_sorting(self):
        # Actions on one target run in the order they joined, except
        # the one that asks to go last.
        txm = self.txm
        txm.begin()
        on_commit(txm, self.results.append, 0, target=self)
        on_commit(txm, self.results.append, 1, target=self)
        on_commit_near_end(txm, self.results.append, 10, target=self)
        on_commit(txm, self.results.append, 2, target=self)
        assert_that(self.results, is_([]))
        txm.commit()
        assert_that(self.results, contains(0, 1, 2, 10))

    def test_abort_does_nothing(self):
        txm = self.txm
        txm.begin()
        on_commit(txm, self.results.append, 0)
        txm.abort()
        assert_that(self.results, is_([]))

    def test_failed_vote_runs_nothing(self):
        class Veto(Exception):
            pass

        def vote():
            raise Veto()

        txm = self.txm
        txm.begin()
        on_commit(txm, self.results.append, 0, target=self)
        on_commit(txm, self.results.append, 1, target=self, vote=vote)
        assert_that(calling(txm.commit), raises(Veto))
        txm.abort()
        assert_that(self.results, is_([]))

    def test_savepoint_rollback(self):
        txm = self.txm
        txm.begin()
        action = on_commit(txm, self.results.append, 5)
        savepoint = txm.savepoint()
        savepoint.rollback()
        txm.commit()
        assert_that(self.results, is_([5]))
        assert_that(action.args, is_((5,)))


if __name__ == '__main__':
    unittest.main()
