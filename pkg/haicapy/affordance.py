"""
This module contains the affordance checks that provide the intention
layer's bottom-up evidence.

Each check returns an unnormalized score: 0 when the intention cannot be
pursued right now, 1 when it can, and something in between when the
shaping heuristics prefer other options. Wait always scores 1/|I|.
"""

from typing import Dict, Optional

import numpy as np

from haicapy.belief import BeliefDistribution
from haicapy.config import AffordanceConfig
from haicapy.enums import IntentionKind, ItemKind
from haicapy.intention import INTENTION_DOMAIN, Intention, IntentionSpace
from haicapy.kitchen import CHOPPABLE
from haicapy.planner import KitchenContext, resolve_target
from haicapy.recipe import salad_recipe_for, soup_recipe_for


def _holds(context: KitchenContext, intention: Intention) -> bool:
    held = context.held
    return held is not None and held.param == intention.param


def _relative(scores: Dict[int, float]) -> Dict[int, float]:
    best = max(scores.values(), default=0.0)
    if best <= 0:
        return {key: 0.0 for key in scores}
    return {key: value / best for key, value in scores.items()}


def _pot_scores(context: KitchenContext, config: AffordanceConfig) -> Dict[int, float]:
    held = context.held
    observation = context.observation
    scores = {}
    for pot_id, (position, pot) in enumerate(zip(context.layout.pots, observation.pots)):
        weight = 0.0
        if held is not None and held.kind.is_ingredient and pot.accepts(held.kind):
            weight = 1.0
        elif held is not None and held.kind == ItemKind.Dish:
            if pot.is_ready:
                weight = 1.0
            elif pot.is_cooking:
                weight = config.cooking_pot_weight
        cost = context.cost(position)
        if weight == 0.0 or cost is None:
            scores[pot_id] = 0.0
        else:
            scores[pot_id] = weight * (1 + pot.count) / (1 + cost)
    return _relative(scores)


def _board_scores(context: KitchenContext) -> Dict[int, float]:
    held = context.held
    needed = held is not None and held.kind in CHOPPABLE and any(
        held.kind in contents for contents in context.outstanding_sets())
    scores = {}
    for board_id, position in enumerate(context.layout.boards):
        cost = context.cost(position)
        scores[board_id] = 1.0 / (1 + cost) if needed and cost is not None else 0.0
    return _relative(scores)


def intention_affordance(context: KitchenContext, intention: Intention, space_size: int,
                         config: Optional[AffordanceConfig] = None) -> float:
    """
    Scores how well the current situation affords an intention.

    :param context: planning view of the acting agent.
    :param intention: the intention to check.
    :param space_size: number of intentions; Wait scores 1/space_size.
    :param config: shaping magnitudes; defaults apply if omitted.
    :return unnormalized, non-negative score.
    """
    config = config or AffordanceConfig()
    kind = intention.kind
    held = context.held

    if kind == IntentionKind.Wait:
        return 1.0 / space_size

    if kind == IntentionKind.InteractWithPot:
        scores = context.memo(('pots', id(config)), lambda: _pot_scores(context, config))
        return scores.get(intention.param, 0.0)

    if kind == IntentionKind.InteractWithBoard:
        scores = context.memo('boards', lambda: _board_scores(context))
        return scores.get(intention.param, 0.0)

    if kind == IntentionKind.GetItem:
        return 1.0 if resolve_target(context, intention) is not None else 0.0

    if kind == IntentionKind.DropItem:
        if not _holds(context, intention) or context.awaits_partner():
            return 0.0
        if resolve_target(context, intention) is None:
            return 0.0
        score = config.slack if context.usable_by_self(held) else 1.0
        if context.handover_counters() and context.usable_by_partner(held):
            score *= config.drop_damping
        return score

    if kind == IntentionKind.HandOver:
        if not _holds(context, intention) or context.partner is None or \
                context.awaits_partner():
            return 0.0
        if not context.usable_by_partner(held) or resolve_target(context, intention) is None:
            return 0.0
        partner_held = context.partner.held
        # A partner holding the plate this goes onto is not busy
        busy = partner_held is not None and not context.completes(partner_held, held)
        score = 1.0
        if busy or context.usable_by_self(held):
            score *= config.handover_damping
        return score

    if kind == IntentionKind.DeliverSoup:
        if held is None or held.kind != ItemKind.Soup or \
                soup_recipe_for(held.ingredient) != intention.param:
            return 0.0
        if resolve_target(context, intention) is None:
            return 0.0
        return 1.0 if context.observation.is_ordered(intention.param) else config.slack

    if kind == IntentionKind.DeliverSalad:
        if held is None or held.kind != ItemKind.Salad or \
                salad_recipe_for(held.contents) != intention.param:
            return 0.0
        if intention.param not in context.observation.state.orders:
            return 0.0
        return 1.0 if resolve_target(context, intention) is not None else 0.0

    return 0.0


def affordance_scores(context: KitchenContext, space: IntentionSpace,
                      config: Optional[AffordanceConfig] = None) -> np.ndarray:
    """Scores of every intention in table order."""
    return np.array([intention_affordance(context, intention, len(space), config)
                     for intention in space.intentions])


def bottom_up(scores: np.ndarray) -> BeliefDistribution:
    """Normalizes affordance scores into the intention layer's evidence."""
    return BeliefDistribution(INTENTION_DOMAIN, scores)
