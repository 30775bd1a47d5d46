"""
This module contains the configuration classes for agents and experiments,
and the loading of experiment configuration files (JSON objects).

Unknown keys are rejected at every level so that typos do not silently
fall back to defaults.
"""

import json
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from haicapy.const import (
    AFFORDANCE_SLACK, COOKING_POT_WEIGHT, DEFAULT_EPISODES_PER_CELL, DEFAULT_K_E,
    DEFAULT_K_P, DEFAULT_SEED, DEFAULT_SP_GRID, DEFAULT_TOM_ALPHA, DEFAULT_TOM_BETA,
    DEFAULT_TOM_MU, DROP_DAMPING, HANDOVER_DAMPING, MAX_STEPS_SALAD, MAX_STEPS_SOUP,
    PUNISH_DECAY, PUNISH_FACTOR, PUNISH_FLOOR, SALAD_LAYOUTS, SOUP_LAYOUTS)
from haicapy.enums import Condition, Domain, SaladTask
from haicapy.exceptions import ConfigurationError
from haicapy.recipe import parse_salad_task
from haicapy.util import serializable

_LOGGER = logging.getLogger(__name__)

# Condition names accepted in configuration files
CONDITION_NAMES = {
    'order_blind_agent2': Condition.OrderBlindAgent2,
    'order_blind': Condition.OrderBlindAgent2,
    'swapped_integration': Condition.SwappedIntegration,
    'swapped': Condition.SwappedIntegration,
    'solo': Condition.Solo,
}

_CANONICAL_CONDITIONS = (
    ('order_blind_agent2', Condition.OrderBlindAgent2),
    ('swapped_integration', Condition.SwappedIntegration),
    ('solo', Condition.Solo),
)


def _check_keys(section: str, data: Dict[str, Any], allowed: Sequence[str]) -> None:
    if not isinstance(data, dict):
        raise ConfigurationError("'{}' must be an object".format(section))
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigurationError("Unknown key(s) in '{}': {}".format(
            section, ', '.join(unknown)))


def _unit(name: str, value: Any) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError("{} must be a number; got {!r}".format(name, value))
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError("{} must be within [0, 1]; got {}".format(name, value))
    return value


class TomConfig(object):
    """Parameters of the partner mentalizing model."""

    KEYS = ('alpha', 'beta', 'mu')

    def __init__(self, alpha: float = DEFAULT_TOM_ALPHA, beta: float = DEFAULT_TOM_BETA,
                 mu: float = DEFAULT_TOM_MU):
        alpha, beta, mu = float(alpha), float(beta), float(mu)
        if not 0.0 < alpha <= 1.0:
            raise ConfigurationError("alpha must be within (0, 1]; got {}".format(alpha))
        if beta < 0:
            raise ConfigurationError("beta must not be negative; got {}".format(beta))
        if mu < 0:
            raise ConfigurationError("mu must not be negative; got {}".format(mu))
        self._alpha = alpha
        self._beta = beta
        self._mu = mu

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TomConfig':
        """Creates the config from a parsed 'tom' section."""
        _check_keys('tom', data, cls.KEYS)
        return cls(**data)

    @property
    def alpha(self) -> float:
        """Likelihood of the observed action matching the predicted one."""
        return self._alpha

    @property
    def beta(self) -> float:
        """Strength of the softmax applied to the posteriors."""
        return self._beta

    @property
    def mu(self) -> float:
        """Noise added before the softmax; keeps every state possible."""
        return self._mu

    def __repr__(self) -> str:
        return "<{}: alpha={}, beta={}, mu={}>".format(
            self.__class__.__name__, self._alpha, self._beta, self._mu)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


class GainConfig(object):
    """Kalman gains of the prediction and evidence blends."""

    KEYS = ('k_p', 'k_e')

    def __init__(self, k_p: float = DEFAULT_K_P, k_e: float = DEFAULT_K_E):
        self._k_p = _unit('k_p', k_p)
        self._k_e = _unit('k_e', k_e)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GainConfig':
        """Creates the config from a parsed 'gains' section."""
        _check_keys('gains', data, cls.KEYS)
        return cls(**data)

    @property
    def k_e(self) -> float:
        """Gain for the bottom-up evidence."""
        return self._k_e

    @property
    def k_p(self) -> float:
        """Gain for the top-down prediction."""
        return self._k_p

    def __repr__(self) -> str:
        return "<{}: k_p={}, k_e={}>".format(self.__class__.__name__, self._k_p, self._k_e)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


class PunishConfig(object):
    """Magnitudes of the intention punishments."""

    KEYS = ('factor', 'floor', 'decay', 'repetition')

    def __init__(self, factor: float = PUNISH_FACTOR, floor: float = PUNISH_FLOOR,
                 decay: float = PUNISH_DECAY, repetition: bool = True):
        self._factor = _unit('punish factor', factor)
        self._floor = _unit('punish floor', floor)
        self._decay = _unit('punish decay', decay)
        if self._floor <= 0:
            raise ConfigurationError("punish floor must be positive")
        self._repetition = bool(repetition)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PunishConfig':
        """Creates the config from a parsed 'punish' section."""
        _check_keys('punish', data, cls.KEYS)
        return cls(**data)

    @property
    def decay(self) -> float:
        """Amount a multiplier recovers towards 1 per step."""
        return self._decay

    @property
    def factor(self) -> float:
        """Multiplier applied per punishment."""
        return self._factor

    @property
    def floor(self) -> float:
        """Lowest multiplier a punished intention can reach."""
        return self._floor

    @property
    def repetition(self) -> bool:
        """Punish picking an item up right after putting it down."""
        return self._repetition

    def __repr__(self) -> str:
        return "<{}: factor={}, floor={}, decay={}, repetition={}>".format(
            self.__class__.__name__, self._factor, self._floor, self._decay,
            self._repetition)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


class AffordanceConfig(object):
    """Magnitudes of the heuristic affordance shaping."""

    KEYS = ('slack', 'handover_damping', 'drop_damping', 'cooking_pot_weight')

    def __init__(self, slack: float = AFFORDANCE_SLACK,
                 handover_damping: float = HANDOVER_DAMPING,
                 drop_damping: float = DROP_DAMPING,
                 cooking_pot_weight: float = COOKING_POT_WEIGHT):
        self._slack = _unit('slack', slack)
        self._handover_damping = _unit('handover_damping', handover_damping)
        self._drop_damping = _unit('drop_damping', drop_damping)
        self._cooking_pot_weight = _unit('cooking_pot_weight', cooking_pot_weight)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AffordanceConfig':
        """Creates the config from a parsed 'affordance' section."""
        _check_keys('affordance', data, cls.KEYS)
        return cls(**data)

    @property
    def cooking_pot_weight(self) -> float:
        """Weight of a still cooking pot when holding a dish."""
        return self._cooking_pot_weight

    @property
    def drop_damping(self) -> float:
        """Damping of dropping an item when it could be handed over instead."""
        return self._drop_damping

    @property
    def handover_damping(self) -> float:
        """Damping of a hand-over when the partner is busy or the agent can
           use the item itself."""
        return self._handover_damping

    @property
    def slack(self) -> float:
        """Score for delivering unordered soup or dropping a usable item."""
        return self._slack

    def __repr__(self) -> str:
        return "<{}: slack={}, handover_damping={}, drop_damping={}, " \
               "cooking_pot_weight={}>".format(
                   self.__class__.__name__, self._slack, self._handover_damping,
                   self._drop_damping, self._cooking_pot_weight)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


class AgentConfig(object):
    """Everything that parameterizes one agent."""

    def __init__(self, sp: float = 0.0, gains: Optional[GainConfig] = None,
                 tom: Optional[TomConfig] = None, punish: Optional[PunishConfig] = None,
                 affordance: Optional[AffordanceConfig] = None,
                 order_blind: bool = False, swapped_integration: bool = False,
                 solo: bool = False, literal_resonance_sign: bool = False):
        self._sp = _unit('sp', sp)
        self._gains = gains or GainConfig()
        self._tom = tom or TomConfig()
        self._punish = punish or PunishConfig()
        self._affordance = affordance or AffordanceConfig()
        self._order_blind = order_blind
        self._swapped_integration = swapped_integration
        self._solo = solo
        self._literal_resonance_sign = literal_resonance_sign

    @property
    def affordance(self) -> AffordanceConfig:
        """Affordance shaping magnitudes."""
        return self._affordance

    @property
    def gains(self) -> GainConfig:
        """Kalman gains of both layers."""
        return self._gains

    @property
    def literal_resonance_sign(self) -> bool:
        """Integrate evidence with the printed (inverted) sign."""
        return self._literal_resonance_sign

    @property
    def order_blind(self) -> bool:
        """Agent sees a uniform distribution instead of the orders."""
        return self._order_blind

    @property
    def punish(self) -> PunishConfig:
        """Punishment magnitudes."""
        return self._punish

    @property
    def solo(self) -> bool:
        """No partner; mentalizing and resonance are disabled."""
        return self._solo

    @property
    def sp(self) -> float:
        """Susceptibility to the partner's inferred beliefs."""
        return self._sp

    @property
    def swapped_integration(self) -> bool:
        """Blend in the partner's beliefs after the evidence instead of before."""
        return self._swapped_integration

    @property
    def tom(self) -> TomConfig:
        """Mentalizing parameters."""
        return self._tom

    def __repr__(self) -> str:
        return "<{}: sp={}, order_blind={}, swapped_integration={}, solo={}>".format(
            self.__class__.__name__, self._sp, self._order_blind,
            self._swapped_integration, self._solo)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


class ExperimentConfig(object):
    """Resolved configuration of a sweep."""

    KEYS = ('domain', 'layouts', 'task', 'sp_grid', 'episodes_per_cell', 'max_steps',
            'conditions', 'seed', 'tom', 'gains', 'punish', 'affordance',
            'onion_only', 'literal_resonance_sign')

    def __init__(self, domain: Domain = Domain.Soup, layouts: Optional[Sequence[str]] = None,
                 task: Optional[SaladTask] = None, sp_grid: Sequence[float] = DEFAULT_SP_GRID,
                 episodes_per_cell: int = DEFAULT_EPISODES_PER_CELL,
                 max_steps: Optional[int] = None,
                 conditions: Condition = Condition.Standard, seed: int = DEFAULT_SEED,
                 tom: Optional[TomConfig] = None, gains: Optional[GainConfig] = None,
                 punish: Optional[PunishConfig] = None,
                 affordance: Optional[AffordanceConfig] = None,
                 onion_only: bool = False, literal_resonance_sign: bool = False):
        self._domain = domain
        if layouts is None:
            layouts = SOUP_LAYOUTS if domain == Domain.Soup else SALAD_LAYOUTS
        self._layouts = tuple(layouts)
        if not self._layouts:
            raise ConfigurationError("At least one layout is required")
        if task is not None and domain != Domain.Salad:
            raise ConfigurationError("A task can only be given for the salad domain")
        self._task = task
        self._sp_grid = tuple(_unit('sp', value) for value in sp_grid)
        if not self._sp_grid:
            raise ConfigurationError("The SP grid must not be empty")
        self._episodes_per_cell = int(episodes_per_cell)
        if self._episodes_per_cell < 1:
            raise ConfigurationError("episodes_per_cell must be at least 1")
        if max_steps is None:
            max_steps = MAX_STEPS_SOUP if domain == Domain.Soup else MAX_STEPS_SALAD
        self._max_steps = int(max_steps)
        if self._max_steps < 1:
            raise ConfigurationError("max_steps must be at least 1")
        self._conditions = Condition(conditions)
        self._seed = int(seed)
        self._tom = tom or TomConfig()
        self._gains = gains or GainConfig()
        self._punish = punish or PunishConfig()
        self._affordance = affordance or AffordanceConfig()
        self._onion_only = bool(onion_only)
        self._literal_resonance_sign = bool(literal_resonance_sign)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        """Creates the config from a parsed configuration file."""
        _check_keys('config', data, cls.KEYS)
        kwargs = dict(data)
        if 'domain' in kwargs:
            domain = Domain.parse_name(str(kwargs['domain']))
            if domain is None:
                raise ConfigurationError("Unknown domain '{}'".format(kwargs['domain']))
            kwargs['domain'] = domain
        if kwargs.get('task') is not None:
            try:
                kwargs['task'] = parse_salad_task(str(kwargs['task']))
            except ValueError as ex:
                raise ConfigurationError(str(ex)) from ex
        if 'conditions' in kwargs:
            kwargs['conditions'] = parse_conditions(kwargs['conditions'])
        for key, section in (('tom', TomConfig), ('gains', GainConfig),
                             ('punish', PunishConfig), ('affordance', AffordanceConfig)):
            if key in kwargs:
                kwargs[key] = section.from_dict(kwargs[key])
        try:
            return cls(**kwargs)
        except TypeError as ex:
            raise ConfigurationError(str(ex)) from ex

    @classmethod
    def load(cls, path: str) -> 'ExperimentConfig':
        """Loads a JSON configuration file."""
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        except json.JSONDecodeError as ex:
            raise ConfigurationError("{}: invalid JSON ({})".format(path, ex)) from ex
        _LOGGER.debug("Loaded configuration from %s", path)
        return cls.from_dict(data)

    #
    # PROPERTIES
    #

    @property
    def affordance(self) -> AffordanceConfig:
        """Affordance shaping magnitudes."""
        return self._affordance

    @property
    def conditions(self) -> Condition:
        """Experimental condition flags."""
        return self._conditions

    @property
    def domain(self) -> Domain:
        """Kitchen domain."""
        return self._domain

    @property
    def episodes_per_cell(self) -> int:
        """Episodes run per layout and SP pair."""
        return self._episodes_per_cell

    @property
    def gains(self) -> GainConfig:
        """Kalman gains of both layers."""
        return self._gains

    @property
    def layouts(self) -> Tuple[str, ...]:
        """Layout names (salad: layouts without the task suffix)."""
        return self._layouts

    @property
    def literal_resonance_sign(self) -> bool:
        """Integrate evidence with the printed (inverted) sign."""
        return self._literal_resonance_sign

    @property
    def max_steps(self) -> int:
        """Step cap per episode."""
        return self._max_steps

    @property
    def onion_only(self) -> bool:
        """Only onion soup is ever ordered."""
        return self._onion_only

    @property
    def punish(self) -> PunishConfig:
        """Punishment magnitudes."""
        return self._punish

    @property
    def seed(self) -> int:
        """Base seed every episode seed is derived from."""
        return self._seed

    @property
    def solo(self) -> bool:
        """Single agent runs."""
        return bool(self._conditions & Condition.Solo)

    @property
    def sp_grid(self) -> Tuple[float, ...]:
        """SP values swept for each agent; a solo run only uses 0."""
        return (0.0,) if self.solo else self._sp_grid

    @property
    def task(self) -> Optional[SaladTask]:
        """Salad task; None runs every task."""
        return self._task

    @property
    def tom(self) -> TomConfig:
        """Mentalizing parameters."""
        return self._tom

    #
    # METHODS - Public
    #

    def agent_config(self, sp: float, order_blind: bool = False) -> AgentConfig:
        """Config for one agent of an episode."""
        return AgentConfig(
            sp=sp, gains=self._gains, tom=self._tom, punish=self._punish,
            affordance=self._affordance, order_blind=order_blind,
            swapped_integration=bool(self._conditions & Condition.SwappedIntegration),
            solo=self.solo, literal_resonance_sign=self._literal_resonance_sign)

    def scenarios(self) -> List[Tuple[str, Optional[SaladTask]]]:
        """(layout, task) pairs run by the sweep, in order."""
        if self._domain == Domain.Soup:
            return [(layout, None) for layout in self._layouts]
        tasks = [self._task] if self._task is not None else list(SaladTask)
        return [(layout, task) for layout in self._layouts for task in tasks]

    def replace(self, **changes: Any) -> 'ExperimentConfig':
        """Copy of the config with some fields replaced (None keeps the
           current value)."""
        values = {
            'domain': self._domain, 'layouts': self._layouts, 'task': self._task,
            'sp_grid': self._sp_grid, 'episodes_per_cell': self._episodes_per_cell,
            'max_steps': self._max_steps, 'conditions': self._conditions,
            'seed': self._seed, 'tom': self._tom, 'gains': self._gains,
            'punish': self._punish, 'affordance': self._affordance,
            'onion_only': self._onion_only,
            'literal_resonance_sign': self._literal_resonance_sign,
        }
        if changes.get('domain') not in (None, self._domain):
            # Domain defaults follow the new domain
            values['layouts'] = None
            values['max_steps'] = None
        for key, value in changes.items():
            if key not in values:
                raise ConfigurationError("Unknown config field '{}'".format(key))
            if value is not None:
                values[key] = value
        return ExperimentConfig(**values)

    def to_dict(self) -> Dict[str, Any]:
        """Resolved config in configuration file form."""
        return {
            'domain': self._domain.name.lower(),
            'layouts': list(self._layouts),
            'task': self._task.name.lower() if self._task else None,
            'sp_grid': list(self._sp_grid),
            'episodes_per_cell': self._episodes_per_cell,
            'max_steps': self._max_steps,
            'conditions': condition_names(self._conditions),
            'seed': self._seed,
            'tom': {key: getattr(self._tom, key) for key in TomConfig.KEYS},
            'gains': {key: getattr(self._gains, key) for key in GainConfig.KEYS},
            'punish': {key: getattr(self._punish, key) for key in PunishConfig.KEYS},
            'affordance': {key: getattr(self._affordance, key)
                           for key in AffordanceConfig.KEYS},
            'onion_only': self._onion_only,
            'literal_resonance_sign': self._literal_resonance_sign,
        }

    def __repr__(self) -> str:
        return "<{}: domain={}, layouts={}, conditions={}, sp_grid={}, " \
               "episodes_per_cell={}, seed={}>".format(
                   self.__class__.__name__, str(self._domain), list(self._layouts),
                   self._conditions.label, list(self.sp_grid),
                   self._episodes_per_cell, self._seed)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


def parse_conditions(names: Sequence[str]) -> Condition:
    """Parses a list of condition names; eg. ['order_blind', 'swapped']."""
    if isinstance(names, str):
        names = [names]
    value = Condition.Standard
    for name in names:
        key = str(name).strip().lower()
        if key == 'standard':
            continue
        if key not in CONDITION_NAMES:
            raise ConfigurationError("Unknown condition '{}'".format(name))
        value |= CONDITION_NAMES[key]
    return value


def condition_names(conditions: Condition) -> List[str]:
    """Configuration file names of the set condition flags."""
    return [name for name, flag in _CANONICAL_CONDITIONS if flag in conditions]
