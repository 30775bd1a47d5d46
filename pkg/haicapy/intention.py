"""
This module defines intentions, the per-layout intention space, the
likelihood tables linking the goal and intention layers, and the goal
layer's top-down input.
"""

from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from haicapy.belief import BeliefDistribution, LikelihoodMatrix
from haicapy.enums import Domain, IntentionKind, ItemKind, ItemParam, Recipe
from haicapy.exceptions import StructuralError
from haicapy.layout import Layout
from haicapy.recipe import RI_ALL_LOOKUP, domain_recipes
from haicapy.util import serializable

GOAL_DOMAIN = 'goal'
INTENTION_DOMAIN = 'intention'

# Items an intention can be about, per domain (in table order)
SOUP_ITEM_PARAMS = (ItemParam.Onion, ItemParam.Tomato, ItemParam.Dish, ItemParam.Soup)
SALAD_ITEM_PARAMS = (ItemParam.Tomato, ItemParam.Lettuce, ItemParam.ChoppedTomato,
                     ItemParam.ChoppedLettuce, ItemParam.Dish, ItemParam.Salad)

# Raw ingredient behind each item parameter; the rest serve every recipe
PARAM_INGREDIENT = {
    ItemParam.Onion: ItemKind.Onion,
    ItemParam.Tomato: ItemKind.Tomato,
    ItemParam.Lettuce: ItemKind.Lettuce,
    ItemParam.ChoppedTomato: ItemKind.Tomato,
    ItemParam.ChoppedLettuce: ItemKind.Lettuce,
}

ITEM_KINDS = (IntentionKind.GetItem, IntentionKind.DropItem, IntentionKind.HandOver)

IntentionParam = Union[ItemParam, Recipe, int, None]


class Intention(NamedTuple):
    """A parameterized high level action. The parameter is an item for
       Get/Drop/HandOver, a pot or board id for interactions and a recipe
       for deliveries."""
    kind: IntentionKind
    param: IntentionParam = None

    def __str__(self) -> str:
        if self.param is None:
            return str(self.kind)
        return '{}({})'.format(self.kind, self.param)


WAIT = Intention(IntentionKind.Wait)


class IntentionSpace(object):
    """
    Goals and intentions instantiated for one layout, in table order, with
    the tables P(intention | goal) and P(goal | intention).

    Both tables are uniform over the pairs that are relevant to each other:
    an intention is relevant to a goal if it is about one of the goal's
    ingredients, or about something every recipe needs (dishes, soups,
    salads, pots, boards, waiting).
    """

    def __init__(self, layout: Layout):
        self._domain = layout.domain
        self._goals = domain_recipes(layout.domain)
        intentions = []  # type: List[Intention]
        if layout.domain == Domain.Soup:
            params = SOUP_ITEM_PARAMS
            intentions += [Intention(IntentionKind.GetItem, p) for p in params]
            intentions += [Intention(IntentionKind.DropItem, p) for p in params]
            intentions += [Intention(IntentionKind.InteractWithPot, pot_id)
                           for pot_id in range(len(layout.pots))]
            intentions += [Intention(IntentionKind.DeliverSoup, goal) for goal in self._goals]
        else:
            params = SALAD_ITEM_PARAMS
            intentions += [Intention(IntentionKind.GetItem, p) for p in params]
            intentions += [Intention(IntentionKind.DropItem, p) for p in params]
            intentions += [Intention(IntentionKind.InteractWithBoard, board_id)
                           for board_id in range(len(layout.boards))]
            intentions += [Intention(IntentionKind.DeliverSalad, goal) for goal in self._goals]
        intentions += [Intention(IntentionKind.HandOver, p) for p in params]
        intentions.append(WAIT)
        self._intentions = intentions
        self._index = {intention: index for index, intention in enumerate(intentions)}

        relevance = np.array([[1.0 if self._is_relevant(goal, intention) else 0.0
                               for intention in intentions]
                              for goal in self._goals])
        self._intention_given_goal = LikelihoodMatrix.from_relevance(
            GOAL_DOMAIN, INTENTION_DOMAIN, relevance)
        self._goal_given_intention = LikelihoodMatrix.from_relevance(
            INTENTION_DOMAIN, GOAL_DOMAIN, relevance.T)

    #
    # PROPERTIES
    #

    @property
    def domain(self) -> Domain:
        """Domain the space was built for."""
        return self._domain

    @property
    def goal_given_intention(self) -> LikelihoodMatrix:
        """Bottom-up table P(goal | intention)."""
        return self._goal_given_intention

    @property
    def goals(self) -> List[Recipe]:
        """Goals, in table order."""
        return self._goals

    @property
    def intention_given_goal(self) -> LikelihoodMatrix:
        """Top-down table P(intention | goal)."""
        return self._intention_given_goal

    @property
    def intentions(self) -> List[Intention]:
        """Intentions, in table order."""
        return self._intentions

    #
    # METHODS - Public
    #

    def index(self, intention: Intention) -> int:
        """Position of an intention in table order."""
        try:
            return self._index[intention]
        except KeyError:
            raise StructuralError("{} is not part of this intention space".format(intention))

    def uniform_goals(self) -> BeliefDistribution:
        """Uniform belief over the goals."""
        return BeliefDistribution.uniform(GOAL_DOMAIN, len(self._goals))

    def uniform_intentions(self) -> BeliefDistribution:
        """Uniform belief over the intentions."""
        return BeliefDistribution.uniform(INTENTION_DOMAIN, len(self._intentions))

    def __len__(self) -> int:
        return len(self._intentions)

    def __repr__(self) -> str:
        return "<{}: domain={}, goals={}, intentions={}>".format(
            self.__class__.__name__,
            str(self._domain),
            len(self._goals),
            len(self._intentions))

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)

    #
    # METHODS - Private / Internal
    #

    @staticmethod
    def _is_relevant(goal: Recipe, intention: Intention) -> bool:
        if intention.kind in ITEM_KINDS:
            ingredient = PARAM_INGREDIENT.get(intention.param)
            return ingredient is None or \
                ingredient in RI_ALL_LOOKUP[goal].ingredient_set
        if intention.kind in (IntentionKind.DeliverSoup, IntentionKind.DeliverSalad):
            return intention.param == goal
        return True


def goal_topdown(observation, goals: Optional[Sequence[Recipe]] = None) -> BeliefDistribution:
    """
    Top-down input of the goal layer: the empirical distribution of the open
    orders (for salads, the recipes still to deliver). An order-blind
    observation yields a uniform distribution.

    :param observation: the agent's Observation.
    :param goals: goal order; defaults to the domain's recipes.
    """
    distribution = observation.order_distribution
    goals = goals or list(distribution)
    return BeliefDistribution(GOAL_DOMAIN, [distribution[goal] for goal in goals])
