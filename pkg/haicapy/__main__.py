"""
This module allows the library to be run as a command line application,
to run experiment sweeps, replay episodes and check layout files.
"""

import argparse
import logging
import sys

from typing import List, Optional
from haicapy.config import ExperimentConfig
from haicapy.const import PROJECT_DESCRIPTION, PROJECT_VERSION
from haicapy.enums import Condition, Domain
from haicapy.exceptions import ConfigurationError
from haicapy.experiment import emit_results, replay, rerun, run_sweep
from haicapy.layout import load_layout_file
from haicapy.recipe import parse_salad_task
from haicapy.util import parse_float_range

_LOGGER = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Command line entry point.
    """

    # Parse command line arguments
    parser = argparse.ArgumentParser(
        prog='haicapy',
        description="haicapy v{} - {}".format(PROJECT_VERSION, PROJECT_DESCRIPTION))
    parser.add_argument(
        '-v', '--verbose',
        help="Display all logging output.",
        action='store_true')
    commands = parser.add_subparsers(dest='command')

    run = commands.add_parser('run', help="Run an SP sweep.")
    run.add_argument(
        '--config',
        help="JSON experiment configuration; flags below override its values.")
    run.add_argument(
        '--domain',
        help="Kitchen domain (soup or salad).")
    run.add_argument(
        '--layouts',
        help="Comma separated layout names.")
    run.add_argument(
        '--task',
        help="Salad task (tomato, tomato_lettuce or mixed); all tasks if omitted.")
    run.add_argument(
        '--sp-grid',
        help="SP values as start:stop:step or a comma separated list.")
    run.add_argument(
        '--episodes', type=int,
        help="Episodes per layout and SP pair.")
    run.add_argument(
        '--max-steps', type=int,
        help="Step cap per episode.")
    run.add_argument(
        '--order-blind',
        help="The sp_j agent does not see the orders.",
        action='store_true')
    run.add_argument(
        '--swapped-integration',
        help="Blend in the partner's beliefs after the own evidence.",
        action='store_true')
    run.add_argument(
        '--solo',
        help="Run a single agent.",
        action='store_true')
    run.add_argument(
        '--seed', type=int,
        help="Base seed.")
    run.add_argument(
        '--out',
        help="Directory for the result files.",
        default='results')
    run.add_argument(
        '--jobs', type=int,
        help="Worker processes; defaults to the number of cores.")
    run.add_argument(
        '--trace-dir',
        help="Write a step trace per episode to this directory.")

    replay_cmd = commands.add_parser(
        'replay', help="Re-run an episode, or a whole sweep, from a run manifest.")
    replay_cmd.add_argument(
        '--manifest', required=True,
        help="Manifest written by a previous run.")
    replay_cmd.add_argument(
        '--episode', type=int,
        help="Episode id; without it every episode is re-run.")
    replay_cmd.add_argument(
        '--trace',
        help="Write the replayed episode's step trace to this file.")
    replay_cmd.add_argument(
        '--out',
        help="Directory for the result files of a full re-run.",
        default='results')
    replay_cmd.add_argument(
        '--jobs', type=int,
        help="Worker processes for a full re-run.")

    validate = commands.add_parser('validate-layout', help="Check a layout file.")
    validate.add_argument('file', help="Layout file to check.")

    args = parser.parse_args(argv)

    # Configure logger
    logging.basicConfig(
        format="%(asctime)s %(levelname)-5s (%(threadName)s) [%(name)s] %(message)s",
        datefmt='%Y-%m-%d %H:%M:%S',
        level=logging.DEBUG if args.verbose else logging.INFO)

    if not args.command:
        parser.print_help()
        return 2

    try:
        if args.command == 'run':
            config = _resolve_config(args)
            _LOGGER.info("Resolved configuration: %s", config)
            result = run_sweep(config, args.jobs, args.trace_dir)
            emit_results(result, args.out)
        elif args.command == 'replay':
            if args.episode is None:
                emit_results(rerun(args.manifest, args.jobs), args.out)
            else:
                record = replay(args.manifest, args.episode, args.trace)
                for name, value in record._asdict().items():
                    print("{}: {}".format(name, value))
        else:
            layout = load_layout_file(args.file)
            print(layout)
    except (ValueError, OSError) as ex:
        _LOGGER.error("%s", ex)
        return 1
    return 0


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.domain:
        domain = Domain.parse_name(args.domain)
        if domain is None:
            raise ConfigurationError("Unknown domain '{}'".format(args.domain))
        changes['domain'] = domain
    if args.layouts:
        changes['layouts'] = [name.strip() for name in args.layouts.split(',') if name.strip()]
    if args.task:
        changes['task'] = parse_salad_task(args.task)
    if args.sp_grid:
        changes['sp_grid'] = parse_float_range(args.sp_grid)
    changes['episodes_per_cell'] = args.episodes
    changes['max_steps'] = args.max_steps
    changes['seed'] = args.seed
    conditions = config.conditions
    if args.order_blind:
        conditions |= Condition.OrderBlindAgent2
    if args.swapped_integration:
        conditions |= Condition.SwappedIntegration
    if args.solo:
        conditions |= Condition.Solo
    changes['conditions'] = conditions
    return config.replace(**changes)


if __name__ == "__main__":
    sys.exit(main())
