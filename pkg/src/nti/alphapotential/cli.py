#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
The ``nti-alphapotential`` command.

Commands:

train
    Train a policy; writes ``experiment.ini``, ``trainlog.jsonl``,
    checkpoints and ``evaluation.json``.
simulate
    Roll out a policy; writes ``paths.csv``, ``mean_trajectory.csv``,
    ``trajectories.svg`` and ``summary.json``.
audit
    Check the potential inequality (and optionally exploitability);
    writes ``audit.json``.
bounds
    Compute the alpha bound; writes ``alpha.json``.
zeta
    Analyze an interaction graph; writes ``zeta.json``.

The policy of ``simulate``, ``audit`` and ``bounds`` is ``--checkpoint``,
else the latest checkpoint in ``--out``, else the untrained network.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import argparse
import json
import logging
import os
import sys

import numpy as np

from .bounds import game_alpha
from .bounds import zeta_exact
from .config import emit_config
from .config import load_config
from .figures import plot_overlay
from .figures import summarize
from .figures import write_mean_csv
from .figures import write_summary
from .graphs import ExponentialDecay
from .graphs import GraphSpec
from .graphs import PowerDecay
from .graphs import decay_interaction_table
from .graphs import zeta_asymptotic_bound
from .interfaces import ConfigError
from .interfaces import DomainError
from .interfaces import NonFiniteActionError
from .interfaces import NonFiniteLossError
from .interfaces import UnknownPresetError
from .loop import LATEST_CHECKPOINT
from .loop import TrainingLoop
from .loop import evaluate
from .noise import sample_noise
from .policy import FeedbackPolicy
from .policy import PolicyParams
from .policy import load_checkpoint
from .presets import get_preset
from .presets import preset_names
from .simulation import control_norms
from .simulation import player_objectives
from .simulation import simulate
from .verify import DEFAULT_BEST_RESPONSE_BUDGET
from .verify import exploitability
from .verify import potential_inequality_audit

__all__ = [
    'EXIT_OK',
    'EXIT_USAGE',
    'EXIT_UNKNOWN_PRESET',
    'EXIT_CONFIG',
    'EXIT_UNWRITABLE',
    'EXIT_NUMERICAL',
    'EXIT_AUDIT_FAILED',
    'main',
    'run',
    'build_parser',
]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNKNOWN_PRESET = 3
EXIT_CONFIG = 4
EXIT_UNWRITABLE = 5
EXIT_NUMERICAL = 6
EXIT_AUDIT_FAILED = 7

CONFIG_FILE_NAME = 'experiment.ini'


class _Unwritable(Exception):
    pass


def _experiment_options():
    parser = argparse.ArgumentParser(add_help=False)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--preset', help="One of: " + ', '.join(preset_names()))
    source.add_argument('--config', help="An experiment INI file")
    parser.add_argument('--out', required=True, help="The output directory")
    parser.add_argument('--seed', type=int)
    parser.add_argument('--iterations', type=int)
    parser.add_argument('--eval-batch', type=int, dest='eval_batch')
    parser.add_argument('--quadrature-nodes', type=int, dest='quadrature_nodes')
    parser.add_argument('--fixed-noise', action='store_true', default=None,
                        dest='fixed_noise')
    parser.add_argument('--checkpoint', help="A policy checkpoint")
    return parser


def _verbosity():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('-v', '--verbose', action='count', default=0)
    return parser


def build_parser():
    common = [_experiment_options(), _verbosity()]
    parser = argparse.ArgumentParser(
        prog='nti-alphapotential',
        description="Train and audit alpha-potential distributed games.")
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    commands.add_parser('train', parents=common, help="Train a policy")
    commands.add_parser('simulate', parents=common, help="Simulate a policy")
    audit = commands.add_parser('audit', parents=common,
                                help="Audit the potential inequality")
    audit.add_argument('--deviations', type=int, default=100)
    audit.add_argument('--kind', choices=('alpha', 'symmetric'), default='alpha')
    audit.add_argument('--magnitude', type=float, default=1.0)
    audit.add_argument('--budget', type=int, default=0,
                       help="Best-response iterations for exploitability; "
                            "0 skips it (default %d when enabled)"
                       % DEFAULT_BEST_RESPONSE_BUDGET)
    commands.add_parser('bounds', parents=common, help="Report the alpha bound")

    zeta = commands.add_parser('zeta', parents=[_verbosity()],
                               help="Bound the asymmetries of an interaction graph")
    zeta.add_argument('--graph', required=True, help="A whitespace-separated edge list")
    zeta.add_argument('--decay', required=True,
                      help="exponential:RHO or power:BETA")
    zeta.add_argument('--amplitude', type=float, default=1.0)
    zeta.add_argument('--out', required=True)
    return parser


def _output_dir(path):
    try:
        if not os.path.isdir(path):
            os.makedirs(path)
    except OSError as e:
        raise _Unwritable("Cannot create %s: %s" % (path, e))
    if not os.access(path, os.W_OK):
        raise _Unwritable("Cannot write to %s" % (path,))
    return path


def _write_text(path, text):
    try:
        with open(path, 'w') as f:
            f.write(text)
            if not text.endswith('\n'):
                f.write('\n')
    except OSError as e:
        raise _Unwritable("Cannot write %s: %s" % (path, e))
    return path


def _experiment(args):
    experiment = get_preset(args.preset) if args.preset else load_config(args.config)
    overrides = {name: getattr(args, name)
                 for name in ('seed', 'iterations', 'eval_batch', 'quadrature_nodes',
                              'fixed_noise')
                 if getattr(args, name) is not None}
    if overrides:
        try:
            experiment = experiment.replace_train(**overrides)
        except DomainError as e:
            raise ConfigError(str(e))
    logger.info("Experiment %r with %r", experiment.name, experiment.train)
    return experiment


def _policy(args, experiment):
    path = args.checkpoint
    if path is None:
        latest = os.path.join(args.out, LATEST_CHECKPOINT)
        path = latest if os.path.isfile(latest) else None
    train = experiment.train
    if path is None:
        logger.info("No checkpoint; using the untrained policy")
        return PolicyParams.for_game(experiment.game, train.grid, train.seed,
                                     train.width, train.blocks)
    try:
        return load_checkpoint(path).params
    except (OSError, KeyError, ValueError) as e:
        raise ConfigError("Cannot read checkpoint %s: %s" % (path, e))


def _evaluation_noise(experiment):
    train = experiment.train
    return sample_noise(experiment.game, train.grid, train.eval_batch, train.seed)


def _train(args, experiment):
    out = args.out
    _write_text(os.path.join(out, CONFIG_FILE_NAME), emit_config(experiment))
    config = experiment.train.replace(out_dir=out, resume_from=args.checkpoint)
    loop = TrainingLoop(experiment.game, config)
    noise = _evaluation_noise(experiment)
    initial = evaluate(loop.params, experiment.game, noise, config.rule)
    params, log = loop()
    final = evaluate(params, experiment.game, noise, config.rule)
    paths = simulate(experiment.game, FeedbackPolicy(params), noise)
    norms = control_norms(paths.actions, paths.grid,
                          experiment.game.n_players, experiment.game.action_dim)
    _write_text(os.path.join(out, 'evaluation.json'), json.dumps({
        'iterations': len(log),
        'initial': initial.to_dict(),
        'final': final.to_dict(),
        'player_objectives': player_objectives(paths, experiment.game).tolist(),
        'control_norms': norms.tolist(),
        'exceeds_cap': bool(np.any(norms > experiment.game.control_cap)),
    }, sort_keys=True, indent=2))
    logger.info("Trained %d iterations: potential %r -> %r",
                len(log), initial.value, final.value)
    return EXIT_OK


def _simulate(args, experiment):
    out = args.out
    game = experiment.game
    paths = simulate(game, FeedbackPolicy(_policy(args, experiment)),
                     _evaluation_noise(experiment))
    try:
        with open(os.path.join(out, 'paths.csv'), 'w') as f:
            paths.to_csv(f)
        with open(os.path.join(out, 'mean_trajectory.csv'), 'w') as f:
            write_mean_csv(paths, game.n_players, f)
        targets = getattr(game.cost, 'targets', None)
        plot_overlay(paths, game.n_players, os.path.join(out, 'trajectories.svg'),
                     targets=targets, title=experiment.name)
        write_summary(summarize(paths, game.n_players, experiment.groups),
                      os.path.join(out, 'summary.json'))
    except OSError as e:
        raise _Unwritable(str(e))
    return EXIT_OK


def _audit(args, experiment):
    game = experiment.game
    params = _policy(args, experiment)
    noise = _evaluation_noise(experiment)
    report = potential_inequality_audit(game, params, args.deviations, noise,
                                        kind=args.kind, seed=experiment.train.seed,
                                        magnitude=args.magnitude,
                                        rule=experiment.train.rule)
    result = {'potential': report.to_dict()}
    if args.budget > 0:
        result['exploitability'] = exploitability(
            game, params, noise, args.budget, seed=experiment.train.seed).to_dict()
    _write_text(os.path.join(args.out, 'audit.json'),
                json.dumps(result, sort_keys=True, indent=2))
    return EXIT_OK if report.passed else EXIT_AUDIT_FAILED


def _bounds(args, experiment):
    game = experiment.game
    grid = experiment.train.grid
    report = game_alpha(game, grid)
    paths = simulate(game, FeedbackPolicy(_policy(args, experiment)),
                     _evaluation_noise(experiment))
    report.check_controls(control_norms(paths.actions, grid, game.n_players,
                                        game.action_dim),
                          game.control_cap)
    _write_text(os.path.join(args.out, 'alpha.json'), report.to_json())
    return EXIT_OK


def _decay(text):
    kind, _, value = text.partition(':')
    try:
        value = float(value)
    except ValueError:
        raise ConfigError("Invalid decay %r; expected exponential:RHO or power:BETA" % (text,))
    if kind in ('exponential', 'exp'):
        return ExponentialDecay(value)
    if kind == 'power':
        return PowerDecay(value)
    raise ConfigError("Unknown decay law %r" % (kind,))


def _zeta(args):
    if not os.path.isfile(args.graph):
        raise ConfigError("No edge list at %s" % (args.graph,))
    try:
        graph = GraphSpec.from_edge_list(args.graph, _decay(args.decay), args.amplitude)
    except DomainError as e:
        raise ConfigError(str(e))
    result = zeta_asymptotic_bound(graph).to_dict()
    result['decay'] = {'kind': graph.decay.kind, 'parameter': graph.decay.parameter}
    result['amplitude'] = graph.amplitude
    result['zeta_decay_table'] = zeta_exact(decay_interaction_table(graph))
    _write_text(os.path.join(args.out, 'zeta.json'),
                json.dumps(result, sort_keys=True, indent=2))
    return EXIT_OK


_COMMANDS = {
    'train': _train,
    'simulate': _simulate,
    'audit': _audit,
    'bounds': _bounds,
}


def _configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level,
                        format='%(asctime)s %(levelname)-5s [%(name)s] %(message)s')


def run(argv=None):
    """
    Run the command in *argv* and return its exit status.
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    _configure_logging(args.verbose)
    try:
        _output_dir(args.out)
        if args.command == 'zeta':
            return _zeta(args)
        experiment = _experiment(args)
        return _COMMANDS[args.command](args, experiment)
    except UnknownPresetError as e:
        logger.error("Unknown preset %s; choose one of %s", e, ', '.join(preset_names()))
        return EXIT_UNKNOWN_PRESET
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_CONFIG
    except _Unwritable as e:
        logger.error("%s", e)
        return EXIT_UNWRITABLE
    except (NonFiniteLossError, NonFiniteActionError) as e:
        logger.error("Numerical failure: %s (checkpoint %s)", e, e.checkpoint)
        return EXIT_NUMERICAL
    except DomainError as e:
        logger.error("%s", e)
        return EXIT_CONFIG


def main(argv=None):
    sys.exit(run(argv))


if __name__ == '__main__':
    main()
