"""
This module contains the satisficing Theory of Mind used to infer the
partner's intentions and goals from its observed actions.

Instead of inverse planning, the observer asks what it would do itself in
the partner's place under each hypothesis; the observed action is likely
(alpha) if it matches that prediction and unlikely otherwise.
"""

import logging
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.special import softmax

from haicapy.affordance import intention_affordance
from haicapy.belief import BeliefDistribution, LikelihoodMatrix
from haicapy.config import AffordanceConfig, TomConfig
from haicapy.enums import IntentionKind, LowAction, Recipe
from haicapy.exceptions import StructuralError
from haicapy.intention import (
    GOAL_DOMAIN, INTENTION_DOMAIN, WAIT, Intention, IntentionSpace)
from haicapy.kitchen import Observation
from haicapy.planner import KitchenContext, next_action
from haicapy.util import serializable

_LOGGER = logging.getLogger(__name__)

ACTION_COUNT = len(LowAction)

# predictor(observation, intention index, goal index) -> predicted action
Predictor = Callable[[Any, int, int], LowAction]


class InferredMind(object):
    """Beliefs about the partner's intention and goal."""

    def __init__(self, intention_belief: BeliefDistribution,
                 goal_belief: BeliefDistribution):
        self._intention_belief = intention_belief
        self._goal_belief = goal_belief

    @classmethod
    def uniform(cls, space: IntentionSpace) -> 'InferredMind':
        """Knows nothing about the partner yet."""
        return cls(space.uniform_intentions(), space.uniform_goals())

    @property
    def goal_belief(self) -> BeliefDistribution:
        """Inferred distribution over the partner's goals."""
        return self._goal_belief

    @property
    def intention_belief(self) -> BeliefDistribution:
        """Inferred distribution over the partner's intentions."""
        return self._intention_belief

    def __repr__(self) -> str:
        return "<{}: intention_mode={}, goal_mode={}>".format(
            self.__class__.__name__,
            self._intention_belief.argmax(),
            self._goal_belief.argmax())

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


def action_likelihood(action: LowAction, predicted: LowAction, config: TomConfig) -> float:
    """alpha if the observed action is the predicted one; otherwise the
       remaining mass split evenly over the other actions."""
    if action == predicted:
        return config.alpha
    return (1.0 - config.alpha) / (ACTION_COUNT - 1)


def predict_action(observation: Observation, intention: Intention,
                   goal: Optional[Recipe] = None, space_size: int = 1,
                   config: Optional[AffordanceConfig] = None,
                   context: Optional[KitchenContext] = None) -> LowAction:
    """
    Predicts the partner's next action by running the observer's own action
    selection from the partner's position.

    :param observation: the observer's observation.
    :param intention: hypothesized partner intention.
    :param goal: hypothesized partner goal. Part of the hypothesis only;
                 with the intention fixed the prediction is the same for
                 every goal, so it is not consulted.
    :param space_size: number of intentions (for the Wait affordance).
    :param config: affordance shaping magnitudes.
    :param context: planning view from the partner's side, if already built.
    :return the predicted action; an infeasible intention is predicted
            like Wait.
    """
    if context is None:
        if observation.partner_id is None:
            return LowAction.Wait
        context = KitchenContext(observation.for_agent(observation.partner_id))
    if intention.kind != IntentionKind.Wait and \
            intention_affordance(context, intention, space_size, config) <= 0:
        intention = WAIT
    return next_action(context, intention)


class ActionPredictor(object):
    """Predictor over an intention space, caching per observation; the
       prediction only depends on the intention."""

    def __init__(self, space: IntentionSpace, config: Optional[AffordanceConfig] = None):
        self._space = space
        self._config = config
        self._observation = None  # type: Optional[Observation]
        self._context = None  # type: Optional[KitchenContext]
        self._cache = {}  # type: Dict[int, LowAction]

    def __call__(self, observation: Observation, intention_index: int,
                 goal_index: int) -> LowAction:
        if observation is not self._observation:
            self._observation = observation
            self._cache = {}
            self._context = None
            if observation.partner_id is not None:
                self._context = KitchenContext(observation.for_agent(observation.partner_id))
        if intention_index not in self._cache:
            intention = self._space.intentions[intention_index]
            if self._context is None:
                action = LowAction.Wait
            else:
                action = predict_action(observation, intention, self._space.goals[goal_index],
                                        len(self._space), self._config, self._context)
            self._cache[intention_index] = action
        return self._cache[intention_index]


def _softmax(values: np.ndarray, config: TomConfig) -> np.ndarray:
    return softmax(config.beta * (values + config.mu))


def tom_update(prev: InferredMind, observed_action: LowAction, observation: Any,
               config: TomConfig, intention_table: LikelihoodMatrix,
               predictor: Predictor) -> InferredMind:
    """
    Updates the beliefs about the partner after observing one of its actions.

    :param prev: beliefs before the action.
    :param observed_action: what the partner did.
    :param observation: the situation in which the partner chose it.
    :param config: mentalizing parameters.
    :param intention_table: P(intention | goal), one row per goal.
    :param predictor: predicts the partner's action per (intention, goal).
    :return the updated beliefs.
    """
    goal_count, intention_count = intention_table.shape
    if prev.goal_belief.size != goal_count or \
            prev.intention_belief.size != intention_count:
        raise StructuralError("Inferred beliefs do not match the intention table")

    likelihood = np.empty((intention_count, goal_count))
    for i in range(intention_count):
        for g in range(goal_count):
            predicted = predictor(observation, i, g)
            likelihood[i, g] = action_likelihood(observed_action, predicted, config)
    joint = likelihood * intention_table.rows.T * prev.goal_belief.probs[np.newaxis, :]
    total = joint.sum()
    intention_posterior = joint.sum(axis=1) / total
    goal_posterior = joint.sum(axis=0) / total

    return InferredMind(
        BeliefDistribution(INTENTION_DOMAIN, _softmax(intention_posterior, config)),
        BeliefDistribution(GOAL_DOMAIN, _softmax(goal_posterior, config)))
