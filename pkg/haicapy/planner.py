"""
This module turns intentions into low level actions: reachability queries,
A* planning over (position, facing) states, the per-observation kitchen
context used by affordance checks, and target resolution.

A movement action always turns the agent; it also moves it if the tile in
that direction is free floor. Only the partner's current tile is treated
as an obstacle; its future moves are not anticipated. The partner's own
reachability ignores the observing agent, which gets out of the way: an
agent with nothing to do that cuts its partner off from a workstation
steps aside.
"""

import heapq
import itertools
import logging
from collections import deque
from typing import (
    Callable, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple)

from haicapy.const import POT_CAPACITY
from haicapy.enums import (
    Domain, IntentionKind, ItemKind, LowAction, MOVEMENT_ACTIONS)
from haicapy.intention import Intention
from haicapy.kitchen import AgentInfo, CHOPPABLE, Item, Observation, merge_items
from haicapy.layout import Layout, Position, row_major
from haicapy.recipe import RI_ALL_LOOKUP, salad_recipe_for, soup_recipe_for
from haicapy.util import manhattan

_LOGGER = logging.getLogger(__name__)

Pose = Tuple[Position, LowAction]


def _apply(layout: Layout, pose: Pose, action: LowAction,
           blocked: FrozenSet[Position]) -> Pose:
    position = pose[0]
    dx, dy = action.delta
    target = (position[0] + dx, position[1] + dy)
    if layout.is_floor(target) and target not in blocked:
        return target, action
    return position, action


def _faces(pose: Pose, target: Position) -> bool:
    dx, dy = pose[1].delta
    return (pose[0][0] + dx, pose[0][1] + dy) == target


class PlanQuery(NamedTuple):
    """Everything plan() needs; blocked tiles are impassable floor."""
    layout: Layout
    start: Position
    facing: LowAction
    target: Position
    blocked: FrozenSet[Position] = frozenset()
    interact_at_goal: bool = True


def plan(query: PlanQuery) -> Optional[List[LowAction]]:
    """
    Finds a shortest action sequence that leaves the agent next to and
    facing the target, followed by Interact if requested.

    Expansion order is Up, Down, Left, Right with insertion order breaking
    ties, so the result is unique for given inputs.

    :return the actions; [] or [Interact] if already facing the target;
            None if the target cannot be reached.
    """
    start = (query.start, query.facing)
    finish = [LowAction.Interact] if query.interact_at_goal else []
    if _faces(start, query.target):
        return finish

    def heuristic(position: Position) -> int:
        return max(0, manhattan(position, query.target) - 1)

    counter = itertools.count()
    frontier = [(heuristic(query.start), next(counter), 0, start)]
    parents = {start: None}  # type: Dict[Pose, Optional[Tuple[Pose, LowAction]]]
    costs = {start: 0}
    closed = set()
    while frontier:
        _, _, cost, pose = heapq.heappop(frontier)
        if pose in closed:
            continue
        closed.add(pose)
        if _faces(pose, query.target):
            actions = []
            while parents[pose] is not None:
                pose, action = parents[pose]
                actions.append(action)
            actions.reverse()
            return actions + finish
        for action in MOVEMENT_ACTIONS:
            successor = _apply(query.layout, pose, action, query.blocked)
            new_cost = cost + 1
            if successor in closed or new_cost >= costs.get(successor, new_cost + 1):
                continue
            costs[successor] = new_cost
            parents[successor] = (pose, action)
            heapq.heappush(frontier, (new_cost + heuristic(successor[0]),
                                      next(counter), new_cost, successor))
    return None


class ReachabilityMap(object):
    """Breadth-first distances from one pose to every reachable pose."""

    def __init__(self, layout: Layout, start: Position, facing: LowAction,
                 blocked: FrozenSet[Position] = frozenset()):
        self._layout = layout
        self._start = start
        start_pose = (start, facing)
        distances = {start_pose: 0}
        queue = deque([start_pose])
        while queue:
            pose = queue.popleft()
            for action in MOVEMENT_ACTIONS:
                successor = _apply(layout, pose, action, blocked)
                if successor not in distances:
                    distances[successor] = distances[pose] + 1
                    queue.append(successor)
        self._distances = distances
        self._cache = {}  # type: Dict[Position, Optional[int]]

    @property
    def start(self) -> Position:
        """Position the distances are measured from."""
        return self._start

    def cost(self, target: Position) -> Optional[int]:
        """Number of actions to face the target and interact with it; None
           if the target cannot be faced."""
        if target not in self._cache:
            best = None
            for action in MOVEMENT_ACTIONS:
                dx, dy = action.delta
                pose = ((target[0] - dx, target[1] - dy), action)
                distance = self._distances.get(pose)
                if distance is not None and (best is None or distance < best):
                    best = distance
            self._cache[target] = None if best is None else best + 1
        return self._cache[target]

    def reachable(self, target: Position) -> bool:
        """True if the target can be faced."""
        return self.cost(target) is not None


class KitchenContext(object):
    """
    Planning view of one observation from the observing agent's side:
    reachability for it and its partner, and the questions affordance
    checks and target resolution ask about items, pots and counters.
    """

    def __init__(self, observation: Observation):
        self._observation = observation
        self._layout = observation.layout
        self._self_agent = observation.self_agent
        self._partner = observation.partner
        blocked = frozenset((self._partner.position,)) if self._partner else frozenset()
        self._self_map = ReachabilityMap(
            self._layout, self._self_agent.position, self._self_agent.facing, blocked)
        self._partner_map = None  # type: Optional[ReachabilityMap]
        if self._partner:
            self._partner_map = ReachabilityMap(
                self._layout, self._partner.position, self._partner.facing)
        self._memo = {}  # type: Dict[object, object]

    #
    # PROPERTIES
    #

    @property
    def held(self) -> Optional[Item]:
        """Item the observing agent holds."""
        return self._self_agent.held

    @property
    def layout(self) -> Layout:
        """Static geometry."""
        return self._layout

    @property
    def observation(self) -> Observation:
        """Observation the context was built from."""
        return self._observation

    @property
    def partner(self) -> Optional[AgentInfo]:
        """The partner's AgentInfo, if there is one."""
        return self._partner

    #
    # METHODS - Public
    #

    def cost(self, target: Position) -> Optional[int]:
        """Plan length (including Interact) for the observing agent."""
        return self._self_map.cost(target)

    def partner_cost(self, target: Position) -> Optional[int]:
        """Plan length (including Interact) for the partner."""
        return self._partner_map.cost(target) if self._partner_map else None

    def memo(self, key: object, compute: Callable[[], object]) -> object:
        """Caches a value derived from this context."""
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def closest(self, candidates: Iterable[Position]) -> Optional[Position]:
        """Candidate with the shortest plan; ties go to the first in
           row-major order. None if no candidate is reachable."""
        best = None
        best_key = None
        for position in candidates:
            cost = self.cost(position)
            if cost is None:
                continue
            key = (cost, row_major(position))
            if best_key is None or key < best_key:
                best, best_key = position, key
        return best

    def usable_by_self(self, item: Item) -> bool:
        """True if the observing agent could make progress with the item."""
        return self._usable(item, self._self_map.cost)

    def usable_by_partner(self, item: Item) -> bool:
        """True if the partner could make progress with the item, including
           plating it onto what the partner holds."""
        if self._partner_map is None:
            return False
        return self._usable(item, self._partner_map.cost) or \
            self.completes(self._partner.held, item)

    def completes(self, held: Optional[Item], item: Item) -> bool:
        """True if the two items plate into a salad that is still wanted."""
        return held is not None and self.plates_usefully(merge_items(held, item))

    def awaits_partner(self) -> bool:
        """True if the observing agent holds the dish or salad that the
           partner's chopped ingredient goes onto. The partner puts the
           ingredient down and the holder picks it up."""
        held = self.held
        partner = self._partner
        if held is None or held.kind not in (ItemKind.Dish, ItemKind.Salad):
            return False
        return partner is not None and partner.held is not None and \
            partner.held.kind == ItemKind.Chopped and self.completes(held, partner.held)

    def stations(self) -> List[Position]:
        """Tiles an agent may need to face: dispensers, pots, boards, serve
           tiles and counters holding an item."""
        layout = self._layout
        return list(layout.dispensers) + list(layout.pots) + list(layout.boards) + \
            list(layout.serve_tiles) + list(self._observation.counters)

    def cuts_off_partner(self, position: Position) -> bool:
        """True if an agent on the tile keeps the partner from a station the
           partner could face otherwise."""
        if self._partner_map is None or position == self._partner.position:
            return False
        return self.memo(('cuts', position), lambda: self._cuts_off(position))

    def has_demand(self, kind: ItemKind) -> bool:
        """True if the kitchen needs another item of this kind fetched from
           a dispenser."""
        observation = self._observation
        circulating = sum(1 for agent in observation.agents
                          if agent.held is not None and agent.held.kind == kind)
        circulating += sum(1 for item in observation.counters.values() if item.kind == kind)
        if kind.is_ingredient:
            needed = sum(POT_CAPACITY - pot.count for pot in observation.pots if pot.accepts(kind))
        elif kind == ItemKind.Dish:
            needed = sum(1 for pot in observation.pots if pot.is_cooking or pot.is_ready)
        else:
            needed = 0
        return needed > circulating

    def outstanding_sets(self) -> List[FrozenSet[ItemKind]]:
        """Ingredient sets of the salads still to deliver."""
        return [RI_ALL_LOOKUP[recipe].ingredient_set
                for recipe in self._observation.state.orders]

    def plates_usefully(self, merged: Optional[Item]) -> bool:
        """True if a plated salad is on the way to an outstanding recipe."""
        return merged is not None and any(
            merged.contents <= contents for contents in self.outstanding_sets())

    def free_counters(self) -> List[Position]:
        """Empty counters the observing agent can reach."""
        counters = self._observation.counters
        return [position for position in self._layout.counters
                if position not in counters and self._self_map.reachable(position)]

    def handover_counters(self) -> List[Position]:
        """Empty counters reachable by the observing agent and bordering the
           floor region the partner stands in."""
        if self._partner is None:
            return []
        return self.memo('handover', self._handover_counters)

    #
    # METHODS - Private / Internal
    #

    def _cuts_off(self, position: Position) -> bool:
        partner = self._partner
        without = ReachabilityMap(self._layout, partner.position, partner.facing,
                                  frozenset((position,)))
        return any(self._partner_map.reachable(station) and not without.reachable(station)
                   for station in self.stations())

    def _handover_counters(self) -> List[Position]:
        own = self._layout.component_of(self._self_agent.position)
        other = self._layout.component_of(self._partner.position)
        result = []
        for position in self.free_counters():
            adjacent = set(self._layout.adjacent_floor(position))
            if adjacent & own and adjacent & other:
                result.append(position)
        return result

    def _usable(self, item: Item, cost: Callable[[Position], Optional[int]]) -> bool:
        observation = self._observation
        layout = self._layout

        def any_reachable(positions: Iterable[Position]) -> bool:
            return any(cost(position) is not None for position in positions)

        if observation.domain == Domain.Soup:
            if item.kind.is_ingredient:
                return any_reachable(position for position, pot in zip(layout.pots, observation.pots)
                                     if pot.accepts(item.kind))
            if item.kind == ItemKind.Dish:
                return any_reachable(position for position, pot in zip(layout.pots, observation.pots)
                                     if pot.is_cooking or pot.is_ready)
            if item.kind == ItemKind.Soup:
                recipe = soup_recipe_for(item.ingredient)
                return observation.is_ordered(recipe) and any_reachable(layout.serve_tiles)
            return False

        # Salad domain
        if item.kind in CHOPPABLE:
            needed = any(item.kind in contents for contents in self.outstanding_sets())
            return needed and any_reachable(layout.boards)
        if item.kind == ItemKind.Salad and salad_recipe_for(item.contents) in \
                observation.state.orders and any_reachable(layout.serve_tiles):
            return True
        return any_reachable(position for position, placed in observation.counters.items()
                             if self.plates_usefully(merge_items(item, placed)))


def _get_item_candidates(context: KitchenContext, intention: Intention) -> List[Position]:
    observation = context.observation
    layout = context.layout
    held = context.held
    param = intention.param
    candidates = []
    if held is not None:
        # Plating: pick up a dish, salad or chopped item to combine with
        if observation.domain == Domain.Salad:
            candidates = [position for position, placed in observation.counters.items()
                          if placed.param == param
                          and context.plates_usefully(merge_items(held, placed))]
        return candidates
    for position, kind in layout.dispensers.items():
        if Item(kind).param == param and context.has_demand(kind):
            candidates.append(position)
    for position, placed in observation.counters.items():
        if placed.param != param:
            continue
        if context.usable_by_self(placed):
            candidates.append(position)
        elif context.partner is not None and context.partner_cost(position) is None \
                and context.usable_by_partner(placed):
            # Relay an item the partner needs but cannot get to
            candidates.append(position)
    return candidates


def resolve_target(context: KitchenContext, intention: Intention) -> Optional[Position]:
    """
    Resolves the tile an intention is about: the closest matching tile by
    plan length, ties going to the first in row-major order.

    :param context: planning view of the acting agent.
    :param intention: any intention; Wait never has a target.
    :return the target position, or None if nothing suitable is reachable.
    """
    return context.memo(('target', intention), lambda: _resolve(context, intention))


def _resolve(context: KitchenContext, intention: Intention) -> Optional[Position]:
    layout = context.layout
    kind = intention.kind
    if kind == IntentionKind.GetItem:
        return context.closest(_get_item_candidates(context, intention))
    if kind == IntentionKind.DropItem:
        return context.closest(context.free_counters())
    if kind == IntentionKind.HandOver:
        return context.closest(context.handover_counters())
    if kind == IntentionKind.InteractWithPot:
        return context.closest(layout.pots[intention.param:intention.param + 1])
    if kind == IntentionKind.InteractWithBoard:
        return context.closest(layout.boards[intention.param:intention.param + 1])
    if kind in (IntentionKind.DeliverSoup, IntentionKind.DeliverSalad):
        return context.closest(layout.serve_tiles)
    return None


def step_aside(context: KitchenContext) -> LowAction:
    """
    Action for an agent with nothing to do: Wait, unless it stands where it
    cuts its partner off from a station. Then it moves to the first free
    neighbour, in Up, Down, Left, Right order, that does not.

    :return a movement action, or Wait if the agent is not in the way or
            every way out is in the way too.
    """
    agent = context.observation.self_agent
    if not context.cuts_off_partner(agent.position):
        return LowAction.Wait
    x, y = agent.position
    for action in MOVEMENT_ACTIONS:
        dx, dy = action.delta
        target = (x + dx, y + dy)
        if context.layout.is_floor(target) and target != context.partner.position \
                and not context.cuts_off_partner(target):
            _LOGGER.debug("Agent %s steps aside %s from %s",
                          context.observation.agent_id, action, agent.position)
            return action
    return LowAction.Wait


def next_action(context: KitchenContext, intention: Intention) -> LowAction:
    """First action of a fresh plan towards the intention's target. For the
       Wait intention, or when no plan exists, see step_aside()."""
    if intention.kind != IntentionKind.Wait:
        target = resolve_target(context, intention)
        if target is not None:
            agent = context.observation.self_agent
            partner = context.partner
            blocked = frozenset((partner.position,)) if partner else frozenset()
            actions = plan(PlanQuery(context.layout, agent.position, agent.facing,
                                     target, blocked))
            if actions:
                return actions[0]
    return context.memo('aside', lambda: step_aside(context))

