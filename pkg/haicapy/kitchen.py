"""
This module contains the kitchen simulator: the world state, the step
function for the soup and salad domains, and agent observations.

Steps are deterministic given the state, the joint action and the random
generator, which is only used to draw replacement orders.
"""

import logging
from collections import OrderedDict
from types import MappingProxyType
from typing import (
    Any, Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Sequence, Tuple)

import numpy as np

from haicapy.const import ORDER_COUNT, POT_CAPACITY, REWARD_SALAD_TASK
from haicapy.enums import Domain, ItemKind, ItemParam, LowAction, Recipe, TileKind
from haicapy.exceptions import LayoutError, StructuralError
from haicapy.layout import Layout, Position
from haicapy.recipe import (
    RI_ALL_LOOKUP, SALAD_TASK_RECIPES, domain_recipes, salad_recipe_for,
    soup_recipe_for)
from haicapy.util import serializable

_LOGGER = logging.getLogger(__name__)

# Raw ingredients that can be cut on a board
CHOPPABLE = (ItemKind.Tomato, ItemKind.Lettuce)

_CHOPPED_PARAMS = {
    ItemKind.Tomato: ItemParam.ChoppedTomato,
    ItemKind.Lettuce: ItemParam.ChoppedLettuce,
}


class Item(NamedTuple):
    """An item held by an agent or lying on a counter."""
    kind: ItemKind
    ingredient: Optional[ItemKind] = None
    contents: FrozenSet[ItemKind] = frozenset()

    @property
    def param(self) -> ItemParam:
        """Intention parameter that refers to this item."""
        if self.kind == ItemKind.Chopped:
            return _CHOPPED_PARAMS[self.ingredient]
        if self.kind == ItemKind.Salad:
            return ItemParam.Salad
        return ItemParam(self.kind.value)

    def __str__(self) -> str:
        if self.kind in (ItemKind.Soup, ItemKind.Chopped):
            return '{}({})'.format(self.kind, self.ingredient)
        if self.kind == ItemKind.Salad:
            return 'Salad({})'.format('+'.join(sorted(str(item) for item in self.contents)))
        return str(self.kind)


class AgentInfo(NamedTuple):
    """Position, facing and held item of one agent."""
    position: Position
    facing: LowAction
    held: Optional[Item] = None

    @property
    def faced_tile(self) -> Position:
        """Tile the agent interacts with."""
        dx, dy = self.facing.delta
        return self.position[0] + dx, self.position[1] + dy


class PotState(NamedTuple):
    """Contents of a pot; timer is None while filling, then counts down to
       0, at which point the soup is ready."""
    ingredient: Optional[ItemKind] = None
    count: int = 0
    timer: Optional[int] = None

    @property
    def is_cooking(self) -> bool:
        """True while the soup is still cooking."""
        return self.timer is not None and self.timer > 0

    @property
    def is_ready(self) -> bool:
        """True when the soup can be picked up with a dish."""
        return self.timer == 0

    def accepts(self, ingredient: ItemKind) -> bool:
        """True if the ingredient can be added to the pot."""
        if self.timer is not None or self.count >= POT_CAPACITY:
            return False
        if soup_recipe_for(ingredient) is None:
            return False
        return self.ingredient is None or self.ingredient == ingredient


def merge_items(first: Item, second: Item) -> Optional[Item]:
    """Plates a chopped ingredient onto a dish or salad; None if the two
       items cannot be combined (eg. the salad already has it)."""
    for chopped, base in ((first, second), (second, first)):
        if chopped.kind != ItemKind.Chopped:
            continue
        if base.kind == ItemKind.Dish:
            return Item(ItemKind.Salad, contents=frozenset((chopped.ingredient,)))
        if base.kind == ItemKind.Salad and chopped.ingredient not in base.contents:
            return Item(ItemKind.Salad, contents=base.contents | {chopped.ingredient})
    return None


class KitchenState(object):
    """Full world snapshot. Exposed collections are read-only views; use
       step() to obtain the successor state."""

    def __init__(self, layout: Layout, agents: Sequence[AgentInfo],
                 pots: Sequence[PotState], counters: Dict[Position, Item],
                 orders: Sequence[Recipe], order_pool: Sequence[Recipe],
                 score: float = 0.0, step_count: int = 0,
                 delivered: Sequence[Recipe] = ()):
        self._layout = layout
        self._agents = list(agents)
        self._pots = list(pots)
        self._counters = dict(counters)
        self._orders = list(orders)
        self._order_pool = tuple(order_pool)
        self._score = score
        self._step_count = step_count
        self._delivered = list(delivered)

    #
    # PROPERTIES
    #

    @property
    def agents(self) -> Tuple[AgentInfo, ...]:
        """Per-agent position, facing and held item."""
        return tuple(self._agents)

    @property
    def counters(self) -> Mapping[Position, Item]:
        """Items lying on counters, by position."""
        return MappingProxyType(self._counters)

    @property
    def delivered(self) -> Tuple[Recipe, ...]:
        """Recipes scored so far, in delivery order."""
        return tuple(self._delivered)

    @property
    def domain(self) -> Domain:
        """Domain of the kitchen."""
        return self._layout.domain

    @property
    def layout(self) -> Layout:
        """Static geometry."""
        return self._layout

    @property
    def order_pool(self) -> Tuple[Recipe, ...]:
        """Recipes replacement orders are drawn from (soup domain)."""
        return self._order_pool

    @property
    def orders(self) -> Tuple[Recipe, ...]:
        """Open soup orders, or the salads still to deliver for the task."""
        return tuple(self._orders)

    @property
    def pots(self) -> Tuple[PotState, ...]:
        """Pot states, indexed by pot id."""
        return tuple(self._pots)

    @property
    def score(self) -> float:
        """Points accumulated by the team."""
        return self._score

    @property
    def step_count(self) -> int:
        """Steps elapsed."""
        return self._step_count

    @property
    def success(self) -> bool:
        """True once a salad task has been delivered entirely."""
        return self.domain == Domain.Salad and not self._orders

    #
    # METHODS - Public
    #

    def copy(self) -> 'KitchenState':
        """Returns an independent copy of the state."""
        return KitchenState(self._layout, self._agents, self._pots, self._counters,
                            self._orders, self._order_pool, self._score,
                            self._step_count, self._delivered)

    def item_at(self, position: Position) -> Optional[Item]:
        """Item lying on the counter at the given position."""
        return self._counters.get(position)

    def pot_at(self, position: Position) -> Optional[PotState]:
        """State of the pot at the given position."""
        try:
            return self._pots[self._layout.pots.index(position)]
        except ValueError:
            return None

    def __repr__(self) -> str:
        return "<{}: layout={}, step_count={}, score={}, orders={}, agents={}>".format(
            self.__class__.__name__,
            self._layout.name,
            self._step_count,
            self._score,
            [str(order) for order in self._orders],
            [(agent.position, str(agent.facing), str(agent.held) if agent.held else None)
             for agent in self._agents])

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self, on_filter=lambda obj, name: name != 'layout')


class Observation(object):
    """What one agent perceives: the full state, except that an order-blind
       agent sees no orders and a uniform order distribution instead."""

    def __init__(self, state: KitchenState, agent_id: int, order_blind: bool = False):
        if not 0 <= agent_id < len(state.agents):
            raise StructuralError("No agent with id {}".format(agent_id))
        self._state = state
        self._agent_id = agent_id
        self._order_blind = order_blind

    #
    # PROPERTIES
    #

    @property
    def agent_id(self) -> int:
        """Index of the observing agent."""
        return self._agent_id

    @property
    def agents(self) -> Tuple[AgentInfo, ...]:
        """All agents."""
        return self._state.agents

    @property
    def counters(self) -> Mapping[Position, Item]:
        """Items lying on counters."""
        return self._state.counters

    @property
    def domain(self) -> Domain:
        """Domain of the kitchen."""
        return self._state.domain

    @property
    def layout(self) -> Layout:
        """Static geometry."""
        return self._state.layout

    @property
    def order_blind(self) -> bool:
        """True if the order channel is hidden from this agent."""
        return self._order_blind

    @property
    def order_distribution(self) -> 'OrderedDict[Recipe, float]':
        """Empirical distribution of the open orders over the domain's
           recipes; uniform when order-blind or when nothing is open."""
        recipes = domain_recipes(self.domain)
        orders = self.orders
        if not orders:
            return OrderedDict((recipe, 1.0 / len(recipes)) for recipe in recipes)
        return OrderedDict((recipe, orders.count(recipe) / len(orders))
                           for recipe in recipes)

    @property
    def orders(self) -> Tuple[Recipe, ...]:
        """Open orders; empty when order-blind."""
        return () if self._order_blind else self._state.orders

    @property
    def partner(self) -> Optional[AgentInfo]:
        """The other agent, if there is one."""
        others = [agent for index, agent in enumerate(self._state.agents)
                  if index != self._agent_id]
        return others[0] if others else None

    @property
    def partner_id(self) -> Optional[int]:
        """Index of the other agent, if there is one."""
        return next((index for index in range(len(self._state.agents))
                     if index != self._agent_id), None)

    @property
    def pots(self) -> Tuple[PotState, ...]:
        """Pot states, indexed by pot id."""
        return self._state.pots

    @property
    def self_agent(self) -> AgentInfo:
        """The observing agent."""
        return self._state.agents[self._agent_id]

    @property
    def state(self) -> KitchenState:
        """Underlying world state."""
        return self._state

    @property
    def step_count(self) -> int:
        """Steps elapsed."""
        return self._state.step_count

    #
    # METHODS - Public
    #

    def for_agent(self, agent_id: int) -> 'Observation':
        """Same view, seen from another agent."""
        return Observation(self._state, agent_id, self._order_blind)

    def is_ordered(self, recipe: Recipe) -> bool:
        """True if the recipe is ordered; an order-blind agent assumes
           every recipe is."""
        return self._order_blind or recipe in self._state.orders

    def __repr__(self) -> str:
        return "<{}: agent_id={}, order_blind={}, step_count={}, orders={}>".format(
            self.__class__.__name__,
            self._agent_id,
            self._order_blind,
            self._state.step_count,
            [str(order) for order in self.orders])


def observe(state: KitchenState, agent_id: int, order_blind: bool = False) -> Observation:
    """Returns the given agent's view of the state."""
    return Observation(state, agent_id, order_blind)


def _draw_order(pool: Sequence[Recipe], rng: np.random.Generator) -> Recipe:
    return pool[int(rng.integers(len(pool)))]


def initial_state(layout: Layout, rng: np.random.Generator, agent_count: int = 2,
                  onion_only: bool = False) -> KitchenState:
    """
    Creates the starting state for an episode.

    :param layout: kitchen geometry.
    :param rng: episode random generator; draws the initial soup orders.
    :param agent_count: 1 for solo runs, otherwise 2.
    :param onion_only: restrict soup orders to onion soup.
    :return the initial KitchenState.
    """
    if agent_count not in (1, 2) or len(layout.spawn_points) < agent_count:
        raise LayoutError("Layout has {} spawn points; {} agents requested".format(
            len(layout.spawn_points), agent_count), layout.name)
    agents = [AgentInfo(position, facing)
              for position, facing in layout.spawn_points[:agent_count]]
    pots = [PotState() for _ in layout.pots]
    counters = {position: Item(kind)
                for position, kind in layout.placed_items.items()}
    if layout.domain == Domain.Soup:
        pool = (Recipe.OnionSoup,) if onion_only else tuple(domain_recipes(Domain.Soup))
        orders = [_draw_order(pool, rng) for _ in range(ORDER_COUNT)]
    else:
        pool = ()
        orders = list(SALAD_TASK_RECIPES[layout.task])
    return KitchenState(layout, agents, pots, counters, orders, pool)


def step(state: KitchenState, joint_action: Sequence[LowAction],
         rng: np.random.Generator) -> Tuple[KitchenState, List[float]]:
    """
    Advances the kitchen by one step.

    :param state: current state; left untouched.
    :param joint_action: one LowAction per agent.
    :param rng: episode random generator, used for replacement orders.
    :return (successor state, per-agent reward); rewards are team rewards.
    """
    if len(joint_action) != len(state.agents):
        raise StructuralError("Expected {} actions; got {}".format(
            len(state.agents), len(joint_action)))
    actions = [LowAction(action) for action in joint_action]
    new = state.copy()
    # pylint: disable=protected-access
    new._pots = [_tick(pot) for pot in new._pots]
    _move_agents(new, actions)
    points = 0.0
    for index, action in enumerate(actions):
        if action == LowAction.Interact:
            points += _interact(new, index, rng)
    new._score += points
    new._step_count += 1
    return new, [points] * len(actions)


def step_salad(state: KitchenState, joint_action: Sequence[LowAction],
               rng: np.random.Generator) -> Tuple[KitchenState, List[float], bool]:
    """As step, for salad kitchens; also returns whether the task has been
       delivered entirely."""
    if state.domain != Domain.Salad:
        raise StructuralError("step_salad requires a salad kitchen")
    new, rewards = step(state, joint_action, rng)
    return new, rewards, new.success


def _tick(pot: PotState) -> PotState:
    if pot.is_cooking:
        return pot._replace(timer=pot.timer - 1)
    return pot


def _move_agents(state: KitchenState, actions: List[LowAction]) -> None:
    # pylint: disable=protected-access
    layout = state.layout
    current = [agent.position for agent in state._agents]
    claimed = set()
    for index, action in enumerate(actions):
        if not action.is_movement:
            continue
        agent = state._agents[index]
        dx, dy = action.delta
        target = (agent.position[0] + dx, agent.position[1] + dy)
        position = agent.position
        # Occupied tiles block, including swaps; the lower index wins a tie
        if layout.is_floor(target) and target not in claimed and \
                not any(target == other for other_index, other in enumerate(current)
                        if other_index != index):
            position = target
            claimed.add(target)
        state._agents[index] = agent._replace(position=position, facing=action)


def _interact(state: KitchenState, index: int, rng: np.random.Generator) -> float:
    # pylint: disable=protected-access
    layout = state.layout
    agent = state._agents[index]
    target = agent.faced_tile
    if not layout.in_bounds(target):
        return 0.0
    held = agent.held
    kind = layout.tile(target)
    points = 0.0

    if kind == TileKind.Dispenser:
        if held is None:
            held = Item(layout.item_at(target))

    elif kind == TileKind.Counter:
        placed = state._counters.get(target)
        if held is None and placed is not None:
            held = state._counters.pop(target)
        elif held is not None and placed is None:
            state._counters[target] = held
            held = None
        elif held is not None and placed is not None:
            merged = merge_items(held, placed)
            if merged is not None:
                del state._counters[target]
                held = merged
            else:
                state._counters[target] = held
                held = placed

    elif kind == TileKind.Pot:
        pot_id = layout.pots.index(target)
        pot = state._pots[pot_id]
        if held is not None and held.kind.is_ingredient and pot.accepts(held.kind):
            count = pot.count + 1
            timer = None
            if count == POT_CAPACITY:
                timer = RI_ALL_LOOKUP[soup_recipe_for(held.kind)].cook_time
            state._pots[pot_id] = PotState(held.kind, count, timer)
            held = None
        elif held is not None and held.kind == ItemKind.Dish and pot.is_ready:
            held = Item(ItemKind.Soup, pot.ingredient)
            state._pots[pot_id] = PotState()

    elif kind == TileKind.CuttingBoard:
        if held is not None and held.kind in CHOPPABLE:
            held = Item(ItemKind.Chopped, held.kind)

    elif kind == TileKind.ServeTile:
        if held is not None and held.kind == ItemKind.Soup:
            recipe = soup_recipe_for(held.ingredient)
            if recipe in state._orders:
                state._orders.remove(recipe)
                state._orders.append(_draw_order(state._order_pool, rng))
                state._delivered.append(recipe)
                points = float(RI_ALL_LOOKUP[recipe].reward)
            else:
                _LOGGER.debug("Unordered %s consumed at step %s",
                              held, state._step_count)
            held = None
        elif held is not None and held.kind == ItemKind.Salad:
            recipe = salad_recipe_for(held.contents)
            if recipe in state._orders:
                state._orders.remove(recipe)
                state._delivered.append(recipe)
                held = None
                if not state._orders:
                    points = REWARD_SALAD_TASK

    state._agents[index] = agent._replace(held=held)
    return points
