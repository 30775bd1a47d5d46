"""
This module contains the kitchen agent: its two-layer belief state, the
processing cycle run on every observation, intention selection and the
punishment of aborted and repeated intentions.
"""

import logging
from collections import OrderedDict
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from haicapy.affordance import affordance_scores, bottom_up
from haicapy.belief import (
    BeliefDistribution, LayerState, ResonanceConfig, layer_update,
    propagate_likelihood, swapped_layer_update)
from haicapy.config import AgentConfig
from haicapy.const import TIE_TOLERANCE
from haicapy.enums import IntentionKind, ItemKind, LowAction, PunishKind
from haicapy.intention import (
    INTENTION_DOMAIN, WAIT, Intention, IntentionSpace, goal_topdown)
from haicapy.intentionchangedinfo import IntentionChangedInfo
from haicapy.kitchen import Item, Observation
from haicapy.layout import Position
from haicapy.mentalizer import ActionPredictor, InferredMind, tom_update
from haicapy.planner import KitchenContext, next_action, resolve_target
from haicapy.util import serializable

_LOGGER = logging.getLogger(__name__)


class AgentState(object):
    """
    Mental state of one agent: goal and intention layers, the beliefs about
    its partner, the active intention and the punish multipliers applied to
    the intention prior and to intention selection.
    """

    def __init__(self, space: IntentionSpace, config: Optional[AgentConfig] = None):
        config = config or AgentConfig()
        self._space = space
        self._config = config
        self._goal_layer = LayerState(space.uniform_goals(),
                                      config.gains.k_p, config.gains.k_e)
        self._intention_layer = LayerState(space.uniform_intentions(),
                                           config.gains.k_p, config.gains.k_e)
        self._inferred = InferredMind.uniform(space)
        self._sp = ResonanceConfig(config.sp)
        self._active_intention = WAIT
        self._active_target = None  # type: Optional[Position]
        self._multipliers = np.ones(len(space))
        self._affordances = np.zeros(len(space))
        self._previous_observation = None  # type: Optional[Observation]
        self._previous_held = None  # type: Optional[Item]
        self._predictor = ActionPredictor(space, config.affordance)
        self._last_change = None  # type: Optional[IntentionChangedInfo]

    #
    # PROPERTIES
    #

    @property
    def active_intention(self) -> Intention:
        """Intention the agent currently pursues."""
        return self._active_intention

    @property
    def active_target(self) -> Optional[Position]:
        """Tile the active intention was resolved to, if any."""
        return self._active_target

    @property
    def affordances(self) -> np.ndarray:
        """Unnormalized affordance scores of the last step, in table order."""
        return self._affordances

    @property
    def config(self) -> AgentConfig:
        """Agent configuration."""
        return self._config

    @property
    def goal_layer(self) -> LayerState:
        """Layer over the goals (recipes)."""
        return self._goal_layer

    @property
    def inferred(self) -> InferredMind:
        """Beliefs about the partner."""
        return self._inferred

    @property
    def intention_layer(self) -> LayerState:
        """Layer over the intentions."""
        return self._intention_layer

    @property
    def last_change(self) -> Optional[IntentionChangedInfo]:
        """Details of the intention change made by the last step, if any."""
        return self._last_change

    @property
    def multipliers(self) -> np.ndarray:
        """Punish multipliers of the intention prior and selection, in table order."""
        return self._multipliers

    @property
    def punished_priors(self) -> 'OrderedDict[Intention, float]':
        """Punish multiplier per intention."""
        return OrderedDict(zip(self._space.intentions, self._multipliers.tolist()))

    @property
    def space(self) -> IntentionSpace:
        """Goals and intentions the agent reasons about."""
        return self._space

    @property
    def sp(self) -> ResonanceConfig:
        """Susceptibility to the partner's inferred beliefs."""
        return self._sp

    #
    # METHODS - Public
    #

    def copy(self) -> 'AgentState':
        """Returns an independent copy of the state."""
        other = AgentState.__new__(AgentState)
        other.__dict__.update(self.__dict__)
        other._goal_layer = self._goal_layer.copy()
        other._intention_layer = self._intention_layer.copy()
        other._multipliers = self._multipliers.copy()
        other._affordances = self._affordances.copy()
        return other

    def __repr__(self) -> str:
        return "<{}: active_intention={}, active_target={}, sp={}, " \
               "goal_prior={}>".format(
                   self.__class__.__name__,
                   str(self._active_intention),
                   self._active_target,
                   self._sp.sp,
                   np.round(self._goal_layer.prior.probs, 4).tolist())

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self, on_filter=lambda obj, name: name not in ('space', 'config'))


def intention_completed(intention: Intention, before: Optional[Item],
                        after: Optional[Item]) -> bool:
    """
    Detects whether the previous step completed an intention, from the
    item the agent held before and after it.
    """
    if before == after:
        return False
    kind = intention.kind
    if kind == IntentionKind.GetItem:
        # Either picked up, or plated onto what was already held
        return after is not None
    if kind in (IntentionKind.DropItem, IntentionKind.HandOver):
        return before is not None and before.param == intention.param and after is None
    if kind in (IntentionKind.InteractWithPot, IntentionKind.InteractWithBoard):
        return before is not None
    if kind in (IntentionKind.DeliverSoup, IntentionKind.DeliverSalad):
        return before is not None and \
            before.kind in (ItemKind.Soup, ItemKind.Salad) and after is None
    return False


def select_intention(posterior: BeliefDistribution, scores: np.ndarray,
                     space: IntentionSpace, current: Intention,
                     multipliers: Optional[np.ndarray] = None) -> Intention:
    """
    MAP intention among those with a positive affordance, after weighting
    the posterior with the punish multipliers. Ties keep the current
    intention, otherwise go to the first in table order.
    """
    weights = posterior.probs if multipliers is None else posterior.probs * multipliers
    probs = np.where(scores > 0, weights, -np.inf)
    best = probs.max()
    tied = np.flatnonzero(probs >= best - TIE_TOLERANCE)
    current_index = space.index(current)
    if current_index in tied:
        return current
    return space.intentions[int(tied[0])]


def _punish(state: AgentState, intention: Intention, kind: PunishKind) -> None:
    punish = state.config.punish
    index = state.space.index(intention)
    # pylint: disable=protected-access
    state._multipliers[index] = max(state._multipliers[index] * punish.factor, punish.floor)
    _LOGGER.debug("Punished %s (%s); multiplier now %.3f",
                  intention, kind, state._multipliers[index])


def punish_intention(state: AgentState, intention: Intention,
                     kind: PunishKind) -> AgentState:
    """
    Lowers an intention's prior for the following steps.

    :param state: agent state; left untouched.
    :param intention: the intention to punish.
    :param kind: reason for the punishment.
    :return a copy of the state with the multiplier reduced.
    """
    new = state.copy()
    _punish(new, intention, kind)
    return new


def reset_after_reward(state: AgentState) -> AgentState:
    """Resets both layers to uniform priors, clears punishments and drops
       the active intention; the state is modified in place."""
    # pylint: disable=protected-access
    state._goal_layer.prior = state.space.uniform_goals()
    state._intention_layer.prior = state.space.uniform_intentions()
    state._multipliers = np.ones(len(state.space))
    state._active_intention = WAIT
    state._active_target = None
    _LOGGER.debug("Mental state reset after reward")
    return state


def agent_step(state: AgentState, observation: Observation,
               partner_last_action: Optional[LowAction] = None) \
        -> Tuple[LowAction, AgentState]:
    """
    Runs one processing cycle.

    :param state: agent state; updated in place.
    :param observation: what the agent perceives now.
    :param partner_last_action: the partner's action in the previous step.
    :return (action to take, updated state); state.last_change tells
            whether the active intention changed.
    """
    # pylint: disable=protected-access
    config = state.config
    space = state.space
    update = swapped_layer_update if config.swapped_integration else layer_update
    has_partner = not config.solo and observation.partner is not None

    # Mentalize in the situation the partner acted in
    if has_partner and partner_last_action is not None and \
            state._previous_observation is not None:
        state._inferred = tom_update(
            state._inferred, partner_last_action, state._previous_observation,
            config.tom, space.intention_given_goal, state._predictor)

    # Goal layer
    goal_posterior = update(
        state._goal_layer,
        goal_topdown(observation, space.goals),
        propagate_likelihood(state._intention_layer.prior, space.goal_given_intention),
        (state._inferred.goal_belief, state._sp) if has_partner else None,
        config.literal_resonance_sign)
    state._goal_layer.prior = goal_posterior

    # Intention layer
    context = KitchenContext(observation)
    scores = affordance_scores(context, space, config.affordance)
    state._affordances = scores
    state._intention_layer.prior = BeliefDistribution(
        INTENTION_DOMAIN, state._intention_layer.prior.probs * state._multipliers)
    intention_posterior = update(
        state._intention_layer,
        propagate_likelihood(goal_posterior, space.intention_given_goal),
        bottom_up(scores),
        (state._inferred.intention_belief, state._sp) if has_partner else None,
        config.literal_resonance_sign)
    state._intention_layer.prior = intention_posterior

    # Select, then punish for the next round
    previous = state._active_intention
    chosen = select_intention(intention_posterior, scores, space, previous,
                              state._multipliers)
    held = observation.self_agent.held
    completed = intention_completed(previous, state._previous_held, held)
    state._multipliers = np.minimum(state._multipliers + config.punish.decay, 1.0)
    punishment = None
    if completed and config.punish.repetition and \
            previous.kind in (IntentionKind.DropItem, IntentionKind.HandOver):
        _punish(state, Intention(IntentionKind.GetItem, previous.param), PunishKind.Repetition)
    if chosen != previous and not completed and previous != WAIT:
        _punish(state, previous, PunishKind.Abort)
        punishment = PunishKind.Abort

    state._active_intention = chosen
    state._active_target = resolve_target(context, chosen)
    state._previous_observation = observation
    state._previous_held = held

    state._last_change = None
    if chosen != previous:
        state._last_change = IntentionChangedInfo(
            observation.step_count, previous, chosen, completed, punishment)
        _LOGGER.debug("Agent %s: %s -> %s", observation.agent_id, previous, chosen)
    return next_action(context, chosen), state


class HaicaAgent(object):
    """An agent acting in the kitchen, driven by an AgentState."""

    def __init__(self, agent_id: int, space: IntentionSpace,
                 config: Optional[AgentConfig] = None):
        self._agent_id = agent_id
        self._state = AgentState(space, config)
        self._on_intention_changed = None

    #
    # PROPERTIES
    #

    @property
    def agent_id(self) -> int:
        """Index of the agent in the kitchen."""
        return self._agent_id

    @property
    def state(self) -> AgentState:
        """Current mental state."""
        return self._state

    #
    # EVENTS
    #

    @property
    def on_intention_changed(self) -> Callable[['HaicaAgent', IntentionChangedInfo], None]:
        """If implemented, called after the active intention has changed."""
        return self._on_intention_changed

    @on_intention_changed.setter
    def on_intention_changed(self, func: Callable[['HaicaAgent', IntentionChangedInfo], None]):
        """
        Define the intention changed callback implementation.

        Expected signature is:
            intention_changed_callback(agent, info)

        agent:          the agent instance for this callback
        info:           provides the old and new intention
        """
        self._on_intention_changed = func

    #
    # METHODS - Public
    #

    def act(self, observation: Observation,
            partner_last_action: Optional[LowAction] = None) -> LowAction:
        """Runs one processing cycle and returns the action to take."""
        action, self._state = agent_step(self._state, observation, partner_last_action)
        info = self._state.last_change
        if info is not None and self._on_intention_changed:
            try:
                self._on_intention_changed(self, info)
            except Exception: # pylint: disable=broad-except
                _LOGGER.error("Unhandled exception in on_intention_changed callback",
                              exc_info=True)
        return action

    def receive_reward(self, reward: float) -> None:
        """Resets the mental state when a reward has been received."""
        if reward > 0:
            reset_after_reward(self._state)

    def __repr__(self) -> str:
        return "<{}: agent_id={}, active_intention={}, sp={}>".format(
            self.__class__.__name__,
            self._agent_id,
            str(self._state.active_intention),
            self._state.sp.sp)
