"""
This module contains the experiment harness: episode scheduling and seed
derivation, the episode loop, sweeps over SP pairs on a worker pool, the
aggregation into heatmaps and the result files.
"""

import csv
import json
import logging
import math
import os
import time
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from haicapy.agent import HaicaAgent
from haicapy.config import ExperimentConfig
from haicapy.const import (
    HEATMAP_PREFIX, HEATMAP_SUFFIX, MANIFEST_FILE, PROJECT_NAME, PROJECT_VERSION,
    RECORDS_FILE, TIMINGS_FILE, TRACE_PREFIX, TRACE_SUFFIX)
from haicapy.enums import Condition, Domain, LowAction, SaladTask
from haicapy.exceptions import ConfigurationError, EpisodeError, HaicaError
from haicapy.intention import IntentionSpace
from haicapy.kitchen import initial_state, observe, step
from haicapy.layout import load_named_layout, scenario_layout_name
from haicapy.recipe import parse_salad_task, salad_task_key
from haicapy.util import stable_seed

_LOGGER = logging.getLogger(__name__)

RECORD_FIELDS = ('episode_id', 'layout', 'sp_i', 'sp_j', 'condition', 'seed',
                 'swapped_spawns', 'total_reward', 'success', 'steps_used',
                 'orders_completed')
TIMING_FIELDS = ('episode_id', 'mean_decision_time')


class EpisodeSpec(NamedTuple):
    """One scheduled episode."""
    episode_id: int
    layout: str
    task: Optional[SaladTask]
    sp_i: float
    sp_j: float
    index: int
    seed: int

    @property
    def scenario(self) -> str:
        """Name of the shipped layout file the episode is played on."""
        return scenario_layout_name(self.layout, self.task)


class EpisodeRecord(NamedTuple):
    """Metrics of one finished episode."""
    episode_id: int
    layout: str
    sp_i: float
    sp_j: float
    condition: str
    seed: int
    swapped_spawns: bool
    total_reward: float
    success: bool
    steps_used: int
    orders_completed: int
    mean_decision_time: float

    @property
    def sp_pair(self) -> Tuple[float, float]:
        """(sp_i, sp_j) as scheduled, before the spawn coin flip."""
        return self.sp_i, self.sp_j


def episode_seed(base_seed: int, scenario: str, sp_i: float, sp_j: float,
                 condition: Condition, index: int) -> int:
    """Seed of one episode, derived from everything that identifies it so
       that single episodes can be replicated."""
    return stable_seed(base_seed, scenario, repr(sp_i), repr(sp_j), condition.label, index)


def schedule(config: ExperimentConfig) -> List[EpisodeSpec]:
    """Every episode of a sweep, in episode id order: scenario, then SP of
       the first slot, then SP of the second slot, then episode index."""
    specs = []
    for layout, task in config.scenarios():
        scenario = scenario_layout_name(layout, task)
        for sp_i in config.sp_grid:
            for sp_j in config.sp_grid:
                for index in range(config.episodes_per_cell):
                    seed = episode_seed(config.seed, scenario, sp_i, sp_j,
                                        config.conditions, index)
                    specs.append(EpisodeSpec(len(specs), layout, task, sp_i, sp_j,
                                             index, seed))
    return specs


def run_episode(spec: EpisodeSpec, config: ExperimentConfig,
                trace_path: Optional[str] = None) -> EpisodeRecord:
    """
    Runs one episode.

    :param spec: the scheduled episode (layout, SP pair and seed).
    :param config: resolved experiment configuration.
    :param trace_path: if given, a line per step is written to this file.
    :return the episode's metrics.
    """
    rng = np.random.default_rng(spec.seed)
    layout = load_named_layout(spec.scenario)
    space = IntentionSpace(layout)
    agent_count = 1 if config.solo else 2

    # The SP pair goes to the two spawn slots in a random order; the blind
    # role belongs to the sp_j agent
    swapped = False if config.solo else bool(rng.integers(2))
    blind_j = bool(config.conditions & Condition.OrderBlindAgent2)
    slots = [(spec.sp_i, False), (spec.sp_j, blind_j)]
    if swapped:
        slots.reverse()
    agents = [HaicaAgent(agent_id, space, config.agent_config(sp, blind))
              for agent_id, (sp, blind) in enumerate(slots[:agent_count])]

    state = initial_state(layout, rng, agent_count, config.onion_only)
    last_actions = [None] * agent_count  # type: List[Optional[LowAction]]
    decision_time = 0.0
    trace = []
    while state.step_count < config.max_steps:
        actions = []
        for agent in agents:
            observation = observe(state, agent.agent_id, agent.state.config.order_blind)
            partner_action = last_actions[1 - agent.agent_id] if agent_count == 2 else None
            started = time.perf_counter()
            actions.append(agent.act(observation, partner_action))
            decision_time += time.perf_counter() - started
        score = state.score
        state, rewards = step(state, actions, rng)
        for agent, reward in zip(agents, rewards):
            agent.receive_reward(reward)
        last_actions = actions
        if trace_path:
            trace.append(OrderedDict((
                ('step', state.step_count),
                ('actions', [str(action) for action in actions]),
                ('score_delta', state.score - score))))
        if layout.domain == Domain.Salad and state.success:
            break

    if trace_path:
        write_trace(trace, trace_path)
    steps = state.step_count
    return EpisodeRecord(
        episode_id=spec.episode_id,
        layout=spec.scenario,
        sp_i=spec.sp_i,
        sp_j=spec.sp_j,
        condition=config.conditions.label,
        seed=spec.seed,
        swapped_spawns=swapped,
        total_reward=state.score,
        success=state.success,
        steps_used=steps,
        orders_completed=len(state.delivered),
        mean_decision_time=decision_time / max(steps * agent_count, 1))


def _run_safely(spec: EpisodeSpec, config: ExperimentConfig,
                trace_dir: Optional[str]) -> EpisodeRecord:
    trace_path = None
    if trace_dir:
        trace_path = os.path.join(trace_dir, '{}{}{}'.format(
            TRACE_PREFIX, spec.episode_id, TRACE_SUFFIX))
    try:
        return run_episode(spec, config, trace_path)
    except Exception as ex: # pylint: disable=broad-except
        raise EpisodeError('{}: {}'.format(type(ex).__name__, ex),
                           spec.episode_id, spec.seed) from ex


class SweepResult(object):
    """Records of a sweep plus the aggregations written to the result files."""

    def __init__(self, config: ExperimentConfig, specs: Sequence[EpisodeSpec],
                 records: Sequence[EpisodeRecord]):
        self._config = config
        self._specs = list(specs)
        self._records = sorted(records, key=lambda record: record.episode_id)

    #
    # PROPERTIES
    #

    @property
    def config(self) -> ExperimentConfig:
        """Configuration the sweep ran with."""
        return self._config

    @property
    def layouts(self) -> List[str]:
        """Scenario layout names, in schedule order."""
        return [scenario_layout_name(layout, task) for layout, task in self._config.scenarios()]

    @property
    def records(self) -> List[EpisodeRecord]:
        """Episode records, in episode id order."""
        return self._records

    @property
    def specs(self) -> List[EpisodeSpec]:
        """Scheduled episodes, in episode id order."""
        return self._specs

    #
    # METHODS - Public
    #

    def cell_stats(self) -> 'OrderedDict[Tuple[str, float, float], Tuple[float, float, int]]':
        """(mean reward, standard error, count) per (layout, sp_i, sp_j)."""
        cells = OrderedDict()  # type: OrderedDict
        for record in self._records:
            cells.setdefault((record.layout, record.sp_i, record.sp_j), []).append(
                record.total_reward)
        stats = OrderedDict()
        for key, rewards in cells.items():
            values = np.array(rewards, dtype=float)
            error = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
            stats[key] = (float(values.mean()), error, int(values.size))
        return stats

    def heatmap(self, layout: Optional[str] = None) -> np.ndarray:
        """
        Mean reward per SP pair (rows sp_i, columns sp_j). Without a layout,
        the mean over layouts of the per-layout means; cells without records
        are NaN.
        """
        grid = list(self._config.sp_grid)
        stats = self.cell_stats()
        layouts = [layout] if layout else self.layouts
        matrix = np.full((len(grid), len(grid)), np.nan)
        for row, sp_i in enumerate(grid):
            for column, sp_j in enumerate(grid):
                means = [stats[(name, sp_i, sp_j)][0] for name in layouts
                         if (name, sp_i, sp_j) in stats]
                if means:
                    matrix[row, column] = float(np.mean(means))
        return matrix

    def __repr__(self) -> str:
        return "<{}: episodes={}, layouts={}, condition={}>".format(
            self.__class__.__name__, len(self._records), self.layouts,
            self._config.conditions.label)


def run_sweep(config: ExperimentConfig, jobs: Optional[int] = None,
              trace_dir: Optional[str] = None) -> SweepResult:
    """
    Runs every scheduled episode of a sweep.

    :param config: resolved experiment configuration.
    :param jobs: worker processes; defaults to the number of cores, and 1
                 runs everything in this process.
    :param trace_dir: directory for per-episode trace files, if wanted.
    :return the sweep result; raises EpisodeError for the first failed
            episode.
    """
    specs = schedule(config)
    jobs = jobs or os.cpu_count() or 1
    if jobs < 1:
        raise ConfigurationError("jobs must be at least 1")
    if trace_dir:
        os.makedirs(trace_dir, exist_ok=True)
    _LOGGER.info("Running %s episodes on %s worker(s)", len(specs), jobs)

    cell_size = config.episodes_per_cell
    cell_count = len(specs) // cell_size if cell_size else 0
    records = []

    def collect(record: EpisodeRecord) -> None:
        records.append(record)
        if len(records) % cell_size == 0:
            _LOGGER.info("Cell %s/%s done", len(records) // cell_size, cell_count)

    if jobs == 1:
        for spec in specs:
            collect(_run_safely(spec, config, trace_dir))
    else:
        chunksize = max(1, len(specs) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            for record in executor.map(_run_safely, specs, repeat(config),
                                       repeat(trace_dir), chunksize=chunksize):
                collect(record)
    return SweepResult(config, specs, records)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _open_for_write(path: str):
    try:
        return open(path, 'w', encoding='utf-8', newline='')
    except OSError as ex:
        raise OSError("Cannot write {}: {}".format(path, ex.strerror or ex)) from ex


def write_records(records: Sequence[EpisodeRecord], path: str) -> None:
    """Writes the episode records (without wall-clock values)."""
    with _open_for_write(path) as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(RECORD_FIELDS)
        for record in records:
            writer.writerow([_format_value(getattr(record, name)) for name in RECORD_FIELDS])


def write_timings(records: Sequence[EpisodeRecord], path: str) -> None:
    """Writes the mean decision time (seconds per agent step) per episode."""
    with _open_for_write(path) as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(TIMING_FIELDS)
        for record in records:
            writer.writerow([record.episode_id, '{:.6f}'.format(record.mean_decision_time)])


def write_heatmap(matrix: np.ndarray, grid: Sequence[float], path: str) -> None:
    """Writes a heatmap as tab separated values with SP labels."""
    with _open_for_write(path) as handle:
        handle.write('\t'.join(['sp_i\\sp_j'] + [_format_value(float(sp)) for sp in grid]) + '\n')
        for sp_i, row in zip(grid, matrix):
            cells = ['nan' if math.isnan(value) else '{:.6f}'.format(value) for value in row]
            handle.write('\t'.join([_format_value(float(sp_i))] + cells) + '\n')


def build_manifest(config: ExperimentConfig, specs: Sequence[EpisodeSpec]) -> Dict[str, Any]:
    """Resolved config, version and every episode's seed."""
    return OrderedDict((
        ('name', PROJECT_NAME),
        ('version', PROJECT_VERSION),
        ('config', config.to_dict()),
        ('episodes', [OrderedDict((
            ('episode_id', spec.episode_id),
            ('layout', spec.layout),
            ('task', salad_task_key(spec.task) if spec.task else None),
            ('sp_i', spec.sp_i),
            ('sp_j', spec.sp_j),
            ('index', spec.index),
            ('seed', spec.seed))) for spec in specs]),
    ))


def emit_results(result: SweepResult, out_dir: str) -> List[str]:
    """
    Writes the result files of a sweep.

    :param result: the finished sweep.
    :param out_dir: directory to write to; created if needed.
    :return paths of the written files.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as ex:
        raise OSError("Cannot create {}: {}".format(out_dir, ex.strerror or ex)) from ex
    label = result.config.conditions.label
    grid = result.config.sp_grid
    paths = []

    path = os.path.join(out_dir, RECORDS_FILE)
    write_records(result.records, path)
    paths.append(path)

    path = os.path.join(out_dir, TIMINGS_FILE)
    write_timings(result.records, path)
    paths.append(path)

    path = os.path.join(out_dir, '{}{}{}'.format(HEATMAP_PREFIX, label, HEATMAP_SUFFIX))
    write_heatmap(result.heatmap(), grid, path)
    paths.append(path)
    for layout in result.layouts:
        path = os.path.join(out_dir, '{}{}_{}{}'.format(
            HEATMAP_PREFIX, label, layout, HEATMAP_SUFFIX))
        write_heatmap(result.heatmap(layout), grid, path)
        paths.append(path)

    path = os.path.join(out_dir, MANIFEST_FILE)
    with _open_for_write(path) as handle:
        json.dump(build_manifest(result.config, result.specs), handle, indent=2)
        handle.write('\n')
    paths.append(path)

    for path in paths:
        _LOGGER.info("Wrote %s", path)
    return paths


def load_manifest(path: str) -> Tuple[ExperimentConfig, List[EpisodeSpec]]:
    """Reads a run manifest back into the config and the schedule."""
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = json.load(handle)
    except json.JSONDecodeError as ex:
        raise ConfigurationError("{}: invalid JSON ({})".format(path, ex)) from ex
    if not isinstance(data, dict) or 'config' not in data or 'episodes' not in data:
        raise ConfigurationError("{} is not a run manifest".format(path))
    if data.get('version') != PROJECT_VERSION:
        _LOGGER.warning("Manifest %s was written by version %s; this is %s",
                        path, data.get('version'), PROJECT_VERSION)
    config = ExperimentConfig.from_dict(data['config'])
    specs = [EpisodeSpec(entry['episode_id'], entry['layout'],
                         parse_salad_task(entry['task']) if entry.get('task') else None,
                         float(entry['sp_i']), float(entry['sp_j']),
                         int(entry['index']), int(entry['seed']))
             for entry in data['episodes']]
    return config, specs


def replay(manifest_path: str, episode_id: int,
           trace_path: Optional[str] = None) -> EpisodeRecord:
    """Re-runs a single episode recorded in a run manifest."""
    config, specs = load_manifest(manifest_path)
    spec = next((item for item in specs if item.episode_id == episode_id), None)
    if spec is None:
        raise HaicaError("Episode {} is not part of {}".format(episode_id, manifest_path))
    return run_episode(spec, config, trace_path)


def rerun(manifest_path: str, jobs: Optional[int] = None,
          trace_dir: Optional[str] = None) -> SweepResult:
    """Re-runs the whole sweep recorded in a run manifest."""
    config, specs = load_manifest(manifest_path)
    result = run_sweep(config, jobs, trace_dir)
    if [spec.seed for spec in result.specs] != [spec.seed for spec in specs]:
        _LOGGER.warning("Seeds scheduled now differ from those in %s", manifest_path)
    return result


def write_trace(trace: Sequence[Dict[str, Any]], path: str) -> None:
    """Writes one JSON object per step."""
    with _open_for_write(path) as handle:
        for entry in trace:
            handle.write(json.dumps(entry) + '\n')
