#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
The policy-gradient training loop.

Each iteration samples noise, rolls out the current policy on a tape,
evaluates the empirical potential and its gradient, and proposes an
Adam step. The plateau schedule watches the potential of the proposed
parameters on one fixed validation bundle. The iteration runs in its
own transaction: the proposal, the log record and any checkpoint are
data managers (see :mod:`nti.alphapotential.manager`) that take effect
only when the transaction commits. An iteration whose loss or gradient
is not finite fails to vote, aborts, and leaves the committed state
untouched.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

import json
import os
import sys
import time

from logging import DEBUG
from logging import WARNING
from logging import getLogger

import numpy as np

from perfmetrics import Metric
from perfmetrics import statsd_client as _statsd_client

from zope.exceptions.exceptionformatter import format_exception
from zope.event import notify

import transaction

from nti.alphapotential import DEFAULT_LONG_RUNNING_COMMIT_IN_SECS
from nti.alphapotential import DEFAULT_SEED

from .game import TimeGrid
from .interfaces import DomainError
from .interfaces import NonFiniteLossError
from .interfaces import IterationCommitted
from .interfaces import LearningRateReduced
from .interfaces import TrainingAborted
from .interfaces import WillRunIteration
from .manager import on_commit
from .manager import on_commit_near_end
from .noise import sample_noise
from .optim import AdamState
from .optim import PlateauSchedule
from .optim import adam_step
from .optim import clip_norm
from .policy import FeedbackPolicy
from .policy import PolicyParams
from .policy import load_checkpoint
from .policy import save_checkpoint
from .potential import empirical_potential
from .potential import potential_objective
from .quadrature import DEFAULT_NODES
from .quadrature import gauss_legendre
from .simulation import simulate

__all__ = [
    'TrainConfig',
    'TrainLog',
    'TrainingLoop',
    'train',
    'iteration_seed',
    'validation_seed',
    'evaluate',
]

logger = getLogger(__name__)

#: The file the log streams to inside an output directory.
LOG_FILE_NAME = 'trainlog.jsonl'

#: The checkpoint of the most recent parameters.
LATEST_CHECKPOINT = 'checkpoint.npz'


def checkpoint_name(iteration):
    "The file holding the parameters used by *iteration*."
    return 'checkpoint-%06d.npz' % iteration


class TrainConfig(object):
    """
    The settings of a training run.
    """

    #: Iterations to run.
    iterations = 500
    #: Trajectories per iteration.
    batch = 500
    horizon = 1.0
    steps = 50
    learning_rate = 1e-3
    patience = 10
    factor = 0.5
    threshold = 1e-4
    min_rate = 1e-5
    seed = DEFAULT_SEED
    quadrature_nodes = DEFAULT_NODES
    #: Reuse one noise bundle for every iteration instead of fresh noise.
    fixed_noise = False
    #: Clip the gradient to this global norm; None disables clipping.
    clip = None
    #: Write a checkpoint every this many iterations; 0 only at the end.
    checkpoint_every = 0
    #: Directory for the log and checkpoints; None keeps everything in memory.
    out_dir = None
    #: A checkpoint to resume from.
    resume_from = None
    #: Hidden width; None means the input size plus ten.
    width = None
    blocks = 4
    #: Trajectories used to evaluate a trained policy.
    eval_batch = 500
    #: Trajectories of the fixed bundle whose potential drives the
    #: plateau schedule; 0 feeds the schedule the training loss.
    validation_batch = 100
    long_commit_duration = DEFAULT_LONG_RUNNING_COMMIT_IN_SECS

    _fields = ('iterations', 'batch', 'horizon', 'steps', 'learning_rate',
               'patience', 'factor', 'threshold', 'min_rate', 'seed',
               'quadrature_nodes', 'fixed_noise', 'clip', 'checkpoint_every',
               'out_dir', 'resume_from', 'width', 'blocks', 'eval_batch',
               'validation_batch', 'long_commit_duration')

    def __init__(self, **kwargs):
        for name, value in kwargs.items():
            if name not in self._fields:
                raise TypeError("Unknown training setting %r" % (name,))
            setattr(self, name, value)
        self.validate()

    def validate(self):
        if self.batch < 1:
            raise DomainError("The batch needs at least one trajectory")
        if self.eval_batch < 1:
            raise DomainError("The evaluation batch needs at least one trajectory")
        if self.validation_batch < 0:
            raise DomainError("The validation batch cannot be negative")
        if self.steps < 1:
            raise DomainError("The grid needs at least one step")
        if self.iterations < 0:
            raise DomainError("The iteration count cannot be negative")
        if not self.learning_rate > 0:
            raise DomainError("The learning rate must be positive")
        if not 0 < self.factor < 1:
            raise DomainError("The reduction factor must lie in (0, 1)")
        if self.clip is not None and not self.clip > 0:
            raise DomainError("The clipping norm must be positive")
        return self

    @property
    def grid(self):
        return TimeGrid(self.horizon, self.steps)

    @property
    def rule(self):
        return gauss_legendre(self.quadrature_nodes)

    def schedule(self):
        return PlateauSchedule(self.patience, self.factor, self.threshold, self.min_rate)

    def replace(self, **kwargs):
        values = self.as_dict()
        values.update(kwargs)
        return TrainConfig(**values)

    def as_dict(self):
        return {name: getattr(self, name) for name in self._fields}

    def __eq__(self, other):
        return isinstance(other, TrainConfig) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return 'TrainConfig(%s)' % ', '.join(
            '%s=%r' % (name, getattr(self, name)) for name in self._fields)


class TrainLog(object):
    """
    The append-only record of a training run, one entry per committed
    iteration, optionally streamed to a JSON-lines file.
    """

    def __init__(self, path=None, append=False):
        self._records = []
        self.path = path
        if path is not None and not append:
            # Start a fresh stream.
            with open(path, 'w'):
                pass

    def append(self, record):
        record = dict(record)
        self._records.append(record)
        if self.path is not None:
            with open(self.path, 'a') as f:
                f.write(json.dumps(record, sort_keys=True))
                f.write('\n')

    @property
    def records(self):
        return tuple(self._records)

    def deterministic_records(self):
        "The records without their wall-clock times."
        return [{k: v for k, v in r.items() if k != 'wall_time'} for r in self._records]

    @property
    def potentials(self):
        return np.array([r['potential'] for r in self._records])

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __getitem__(self, index):
        return self._records[index]

    @classmethod
    def load(cls, path):
        log = cls()
        with open(path) as f:
            for line in f:
                if line.strip():
                    log._records.append(json.loads(line))
        return log

    def __repr__(self):
        return '<%s records=%d path=%r>' % (type(self).__name__, len(self), self.path)


def iteration_seed(seed, iteration):
    """
    The noise seed of *iteration*, derived from the run's *seed*.
    """
    state = np.random.SeedSequence(seed, spawn_key=(iteration,)).generate_state(1, np.uint64)
    return int(state[0])


def validation_seed(seed):
    """
    The seed of the run's validation bundle. It never coincides with
    an :func:`iteration_seed`.
    """
    state = np.random.SeedSequence(seed, spawn_key=(0, 1)).generate_state(1, np.uint64)
    return int(state[0])


_commit =Metric('alphapotential.iteration.commit', rate=0.1)(lambda tx: tx.commit())
_abort = Metric('alphapotential.iteration.abort', rate=0.1)(lambda tx: tx.abort())


def _do_commit(tx, long_commit_duration, iteration,
               _logger=logger,
               _DEBUG=DEBUG,
               _WARNING=WARNING,
               _perf_counter=time.perf_counter):
    begin = _perf_counter()
    _commit(tx)
    level = _DEBUG
    duration = _perf_counter() - begin
    if duration > long_commit_duration:
        level = _WARNING
    if _logger.isEnabledFor(level):
        _logger.log(level, "Committed iteration=%s, duration=%s", iteration, duration)


class TrainingLoop(object):
    """
    Runs the training iterations of one game.

    Running the loop sets these :mod:`perfmetrics` timers:

    alphapotential.iteration.commit
        Time taken to commit an iteration. Sampled.
    alphapotential.iteration.abort
        Time taken to abort a failed iteration. Sampled.

    and increments these counters:

    alphapotential.iteration.successful
        Committed iterations.
    alphapotential.iteration.failed
        Iterations that aborted.
    alphapotential.rate_reduced
        Learning-rate reductions.
    alphapotential.checkpoint
        Checkpoints written.

    :mod:`zope.event` receives :class:`~.WillRunIteration`,
    :class:`~.IterationCommitted`, :class:`~.LearningRateReduced` and
    :class:`~.TrainingAborted`.
    """

    stat_sample_rate = 0.2

    _statsd_client = _statsd_client

    class _StatCollector(object):
        __slots__ = ('client', 'rate', 'buf')

        def __init__(self, client, rate):
            self.client = client
            self.rate = rate
            self.buf = []

        def __call__(self, name, count=1):
            self.client.incr(name, count=count, buf=self.buf, rate=self.rate)

        def flush(self):
            self.client.sendbuf(self.buf)
            self.buf = []

    class _NullStatCollector(object):
        @staticmethod
        def __call__(name, count=1):
            "Does nothing"

        @staticmethod
        def flush():
            "Does nothing"

    _null_stat_collector = _NullStatCollector()

    def __init__(self, game, config, transaction_manager=None):
        self.game = game
        self.config = config
        self.grid = config.grid
        self.rule = config.rule
        self.schedule = config.schedule()
        self.long_commit_duration = config.long_commit_duration
        # Our own manager, in explicit mode, so iterations never see
        # another transaction.
        self.transaction_manager = transaction_manager or transaction.TransactionManager(
            explicit=True)
        game.validate(self.grid)

        out_dir = config.out_dir
        self.log = TrainLog(os.path.join(out_dir, LOG_FILE_NAME) if out_dir else None,
                            append=bool(config.resume_from))
        if config.resume_from:
            checkpoint = load_checkpoint(config.resume_from)
            self.params = checkpoint.params
            self.iteration = checkpoint.iteration
            self.adam = checkpoint.adam or AdamState.zeros(self.params.size,
                                                           config.learning_rate)
            self.schedule_state = (checkpoint.schedule
                                   or self.schedule.initial(self.adam.learning_rate))
            logger.info("Resuming at iteration %d from %s",
                        self.iteration, config.resume_from)
        else:
            self.params = PolicyParams.for_game(game, self.grid, config.seed,
                                                config.width, config.blocks)
            self.iteration = 0
            self.adam = AdamState.zeros(self.params.size, config.learning_rate)
            self.schedule_state = self.schedule.initial(config.learning_rate)
        self._fixed_noise = None
        self._validation_noise = None

    def __repr__(self):
        return '<%s.%s at 0x%x iteration=%s game=%r>' % (
            type(self).__module__, type(self).__name__, id(self),
            self.iteration, self.game)

    @property
    def learning_rate(self):
        return self.adam.learning_rate

    def noise_for(self, iteration):
        """
        The noise of *iteration*: one fixed bundle, or a fresh bundle
        from a seed derived from the run's seed and the iteration.
        """
        config = self.config
        if config.fixed_noise:
            if self._fixed_noise is None:
                self._fixed_noise = sample_noise(self.game, self.grid, config.batch, config.seed)
            return self._fixed_noise
        return sample_noise(self.game, self.grid, config.batch,
                            iteration_seed(config.seed, iteration))

    def validation_noise(self):
        """
        The fixed bundle the plateau schedule is evaluated on, or None
        when the schedule watches the training loss.
        """
        config = self.config
        if not config.validation_batch:
            return None
        if self._validation_noise is None:
            self._validation_noise = sample_noise(self.game, self.grid, config.validation_batch,
                                                  validation_seed(config.seed))
        return self._validation_noise

    def validate(self, params):
        """
        The potential of *params* on :meth:`validation_noise`, without
        recording a tape.
        """
        noise = self.validation_noise()
        paths = simulate(self.game, FeedbackPolicy(params), noise)
        return empirical_potential(paths, self.game, self.rule).value

    def describe_iteration(self, iteration):
        return 'iteration %d' % (iteration,)

    def _apply(self, iteration, params, adam, schedule_state):
        self.params = params
        self.adam = adam
        self.schedule_state = schedule_state
        self.iteration = iteration + 1

    def write_checkpoint(self, iteration=None):
        """
        Write the current parameters, optimizer and schedule state to
        the output directory as the checkpoint of *iteration* (by
        default the next iteration to run) and as the latest checkpoint.

        :return: The path of the numbered checkpoint, or None without an
            output directory.
        """
        out_dir = self.config.out_dir
        if not out_dir:
            return None
        iteration = self.iteration if iteration is None else iteration
        path = os.path.join(out_dir, checkpoint_name(iteration))
        for target in (path, os.path.join(out_dir, LATEST_CHECKPOINT)):
            save_checkpoint(target, self.params, self.adam, self.schedule_state, iteration)
        logger.debug("Wrote checkpoint %s", path)
        return path

    def _vote(self, iteration, value, grads):
        def vote():
            if not np.isfinite(value):
                raise NonFiniteLossError(iteration)
            if not np.all(np.isfinite(grads)):
                raise NonFiniteLossError(iteration, 'gradient')
        return vote

    def run_iteration(self, iteration):
        """
        Compute the update of *iteration* and register its effects with
        the current transaction. Returns the log record and the new
        schedule state.
        """
        config = self.config
        begin = time.perf_counter()
        noise = self.noise_for(iteration)
        objective = potential_objective(self.params, self.game, noise, self.rule)
        potential = objective.potential
        grads = objective.gradient()
        grad_norm = float(np.linalg.norm(grads))

        flat, adam = adam_step(self.params.flat(), clip_norm(grads, config.clip), self.adam)
        params = self.params.with_flat(flat) if np.all(np.isfinite(flat)) else self.params
        watched = potential.value
        if config.validation_batch and np.isfinite(watched):
            watched = self.validate(params)
        schedule_state = self.schedule.observe(self.schedule_state, watched)
        adam = adam.with_learning_rate(schedule_state.learning_rate)

        record = {
            'n': iteration,
            'learning_rate': self.adam.learning_rate,
            'grad_norm': grad_norm,
        }
        record.update(potential.to_dict())
        if config.validation_batch:
            record['validation'] = watched
        record['wall_time'] = time.perf_counter() - begin

        txm = self.transaction_manager
        on_commit(txm, self._apply, iteration, params, adam, schedule_state,
                  target=self, vote=self._vote(iteration, potential.value, grads))
        on_commit(txm, self.log.append, record, target=self)
        every = config.checkpoint_every
        if every and (iteration + 1) % every == 0:
            on_commit_near_end(txm, self.write_checkpoint, target=self)
        return record, schedule_state

    def __call__(self):
        """
        Run the remaining iterations.

        :return: ``(params, log)``.
        :raises NonFiniteLossError: If an iteration produced a
            non-finite loss or gradient, after writing a checkpoint of
            the last committed parameters.
        """
        client = self._statsd_client()
        stats = (
            self._StatCollector(client, self.stat_sample_rate)
            if client
            else self._null_stat_collector
        )
        try:
            while self.iteration < self.config.iterations:
                self.__iteration(self.iteration, stats)
            if self.config.out_dir:
                self.write_checkpoint()
                stats('alphapotential.checkpoint')
        finally:
            stats.flush()
        return self.params, self.log

    def __iteration(self, iteration, stats):
        txm = self.transaction_manager
        tx = txm.begin()
        tx.note(self.describe_iteration(iteration))
        old_rate = self.learning_rate
        notify(WillRunIteration(self, iteration, old_rate))
        try:
            record, _ = self.run_iteration(iteration)
            _do_commit(tx, self.long_commit_duration, iteration)
        except ArithmeticError as e:
            self.__abort(tx, iteration, e, stats)
            raise
        except Exception:
            self.__abort(tx, iteration, None, stats)
            raise

        stats('alphapotential.iteration.successful')
        if logger.isEnabledFor(DEBUG):
            logger.debug("Iteration %d: potential=%r stderr=%r grad_norm=%r lr=%r",
                         iteration, record['potential'], record['stderr'],
                         record['grad_norm'], record['learning_rate'])
        every = self.config.checkpoint_every
        if every and (iteration + 1) % every == 0:
            stats('alphapotential.checkpoint')
        if self.learning_rate < old_rate:
            logger.info("Reduced the learning rate from %s to %s after iteration %d",
                        old_rate, self.learning_rate, iteration)
            stats('alphapotential.rate_reduced')
            notify(LearningRateReduced(self, iteration, old_rate, self.learning_rate))
        notify(IterationCommitted(self, iteration, record))

    def __abort(self, tx, iteration, error, stats):
        exc_info = sys.exc_info()
        try:
            try:
                _abort(tx)
            except Exception: # pylint:disable=broad-except
                logger.exception("Failed to abort iteration %d", iteration)
            stats('alphapotential.iteration.failed')
            if error is None:
                return
            checkpoint = self.write_checkpoint()
            if checkpoint:
                stats('alphapotential.checkpoint')
            error.checkpoint = checkpoint
            logger.warning("Aborted training at iteration %d; last committed parameters in %s\n%s",
                           iteration, checkpoint, ''.join(format_exception(*exc_info)))
            notify(TrainingAborted(self, iteration, error, checkpoint))
        finally:
            del exc_info


def train(game, config):
    """
    Train a policy for *game*.

    :return: ``(PolicyParams, TrainLog)``.
    """
    return TrainingLoop(game, config)()


def evaluate(params, game, noise, rule=None):
    """
    The empirical potential of *params* on *noise*, computed exactly as
    training computes it.

    :rtype: ~.PotentialValue
    """
    return potential_objective(params, game, noise, rule).potential
