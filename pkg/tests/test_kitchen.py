"""Tests for the kitchen simulator."""

import itertools
from collections import Counter

import pytest

from haicapy.enums import ItemKind, ItemParam, LowAction, Recipe
from haicapy.exceptions import LayoutError, StructuralError
from haicapy.intention import goal_topdown
from haicapy.kitchen import (
    Item, PotState, initial_state, merge_items, observe, step, step_salad)
from haicapy.layout import load_named_layout
from haicapy.recipe import RI_ALL_LOOKUP, SALAD_TASK_RECIPES

ONION = Item(ItemKind.Onion)
DISH = Item(ItemKind.Dish)
ONION_SOUP = Item(ItemKind.Soup, ItemKind.Onion)
CHOPPED_TOMATO = Item(ItemKind.Chopped, ItemKind.Tomato)
TOMATO_SALAD = Item(ItemKind.Salad, contents=frozenset({ItemKind.Tomato}))
LETTUCE_SALAD = Item(ItemKind.Salad, contents=frozenset({ItemKind.Lettuce}))

WAIT2 = [LowAction.Wait, LowAction.Wait]


def _salad_state(make_state, name, agents):
    layout = load_named_layout(name)
    counters = {position: Item(kind) for position, kind in layout.placed_items.items()}
    return make_state(layout, agents, counters=counters,
                      orders=SALAD_TASK_RECIPES[layout.task])


def test_move_into_counter_only_turns(small_layout, make_state, rng):
    state = make_state(small_layout, [((1, 1), LowAction.Left, None),
                                      ((2, 2), LowAction.Left, None)])
    new, rewards = step(state, [LowAction.Up, LowAction.Wait], rng)
    assert new.agents[0].position == (1, 1)
    assert new.agents[0].facing == LowAction.Up
    assert rewards == [0.0, 0.0]
    assert new.step_count == 1
    # The original state is left untouched
    assert state.agents[0].facing == LowAction.Left


def test_dispenser_gives_item_to_empty_hand(small_layout, make_state, rng):
    state = make_state(small_layout, [((1, 1), LowAction.Left, None),
                                      ((2, 2), LowAction.Up, DISH)])
    new, _ = step(state, [LowAction.Interact, LowAction.Wait], rng)
    assert new.agents[0].held == ONION
    again, _ = step(new, [LowAction.Interact, LowAction.Wait], rng)
    assert again.agents[0].held == ONION


def test_pot_cooks_and_plates(small_layout, make_state, rng):
    state = make_state(small_layout, [((2, 1), LowAction.Up, ONION),
                                      ((1, 2), LowAction.Up, None)],
                       pots=[PotState(ItemKind.Onion, 2)])
    state, _ = step(state, [LowAction.Interact, LowAction.Wait], rng)
    assert state.pots[0] == PotState(ItemKind.Onion, 3, 20)
    assert state.agents[0].held is None

    for _ in range(19):
        state, _ = step(state, WAIT2, rng)
    assert state.pots[0].is_cooking
    state, _ = step(state, WAIT2, rng)
    assert state.pots[0].is_ready

    plated = make_state(small_layout, [((2, 1), LowAction.Up, DISH),
                                       ((1, 2), LowAction.Up, None)],
                        pots=[state.pots[0]])
    plated, _ = step(plated, [LowAction.Interact, LowAction.Wait], rng)
    assert plated.agents[0].held == ONION_SOUP
    assert plated.pots[0] == PotState()


def test_pot_rejects_other_ingredient_and_early_dish(small_layout, make_state, rng):
    pots = [PotState(ItemKind.Onion, 1)]
    state = make_state(small_layout, [((2, 1), LowAction.Up, Item(ItemKind.Tomato)),
                                      ((1, 2), LowAction.Up, None)], pots=pots)
    new, _ = step(state, [LowAction.Interact, LowAction.Wait], rng)
    assert new.pots[0] == pots[0]
    assert new.agents[0].held == Item(ItemKind.Tomato)

    cooking = [PotState(ItemKind.Onion, 3, 5)]
    state = make_state(small_layout, [((2, 1), LowAction.Up, DISH),
                                      ((1, 2), LowAction.Up, None)], pots=cooking)
    new, _ = step(state, [LowAction.Interact, LowAction.Wait], rng)
    assert new.agents[0].held == DISH
    assert new.pots[0].timer == 4


def test_serving_ordered_soup_scores_and_replaces_order(small_layout, make_state, rng):
    state = make_state(small_layout, [((3, 1), LowAction.Right, ONION_SOUP),
                                      ((1, 2), LowAction.Up, None)])
    new, rewards = step(state, [LowAction.Interact, LowAction.Wait], rng)
    assert rewards == [20.0, 20.0]
    assert new.score == 20.0
    assert new.delivered == (Recipe.OnionSoup,)
    assert len(new.orders) == 2
    assert Recipe.TomatoSoup in new.orders
    assert new.agents[0].held is None


def test_unordered_soup_is_consumed_for_nothing(small_layout, make_state, rng):
    state = make_state(small_layout, [((3, 1), LowAction.Right, ONION_SOUP),
                                      ((1, 2), LowAction.Up, None)],
                       orders=(Recipe.TomatoSoup, Recipe.TomatoSoup))
    new, rewards = step(state, [LowAction.Interact, LowAction.Wait], rng)
    assert rewards == [0.0, 0.0]
    assert new.agents[0].held is None
    assert new.orders == (Recipe.TomatoSoup, Recipe.TomatoSoup)


def test_counter_place_take_and_swap(small_layout, make_state, rng):
    state = make_state(small_layout, [((1, 1), LowAction.Up, None),
                                      ((1, 2), LowAction.Left, ONION)])
    state, _ = step(state, [LowAction.Wait, LowAction.Interact], rng)
    assert state.counters == {(0, 2): ONION}
    assert state.agents[1].held is None
    state, _ = step(state, [LowAction.Wait, LowAction.Interact], rng)
    assert state.agents[1].held == ONION
    assert dict(state.counters) == {}

    swap = make_state(small_layout, [((1, 1), LowAction.Up, None),
                                     ((1, 2), LowAction.Left, DISH)],
                      counters={(0, 2): ONION})
    swap, _ = step(swap, [LowAction.Wait, LowAction.Interact], rng)
    assert swap.agents[1].held == ONION
    assert swap.counters[(0, 2)] == DISH


def test_conflicting_moves_lower_index_wins(small_layout, make_state, rng):
    state = make_state(small_layout, [((1, 1), LowAction.Up, None),
                                      ((3, 1), LowAction.Up, None)])
    new, _ = step(state, [LowAction.Right, LowAction.Left], rng)
    assert new.agents[0].position == (2, 1)
    assert new.agents[1].position == (3, 1)
    assert new.agents[1].facing == LowAction.Left


def test_agents_cannot_swap_places(small_layout, make_state, rng):
    state = make_state(small_layout, [((1, 1), LowAction.Up, None),
                                      ((2, 1), LowAction.Up, None)])
    new, _ = step(state, [LowAction.Right, LowAction.Left], rng)
    assert [agent.position for agent in new.agents] == [(1, 1), (2, 1)]


@pytest.mark.parametrize('positions', [
    ((1, 1), (3, 1)), ((1, 1), (2, 1)), ((2, 1), (2, 2)), ((1, 2), (3, 2))])
def test_no_two_agents_share_a_tile(small_layout, make_state, rng, positions):
    state = make_state(small_layout, [(positions[0], LowAction.Up, None),
                                      (positions[1], LowAction.Up, None)])
    for joint in itertools.product(LowAction, repeat=2):
        new, _ = step(state, list(joint), rng)
        first, second = (agent.position for agent in new.agents)
        assert first != second
        assert small_layout.is_floor(first) and small_layout.is_floor(second)
        for before, after, action in zip(state.agents, new.agents, joint):
            if action.is_movement:
                assert after.facing == action
            else:
                assert after.position == before.position


def test_step_checks_action_count(small_layout, make_state, rng):
    state = make_state(small_layout, [((1, 1), LowAction.Up, None),
                                      ((2, 2), LowAction.Up, None)])
    with pytest.raises(StructuralError):
        step(state, [LowAction.Wait], rng)
    with pytest.raises(StructuralError):
        step_salad(state, WAIT2, rng)


def test_initial_state(small_layout, rng):
    state = initial_state(small_layout, rng)
    assert len(state.orders) == 2
    assert [agent.position for agent in state.agents] == [(1, 1), (2, 2)]
    assert all(agent.held is None for agent in state.agents)
    assert state.pots == (PotState(),)

    onion = initial_state(small_layout, rng, onion_only=True)
    assert onion.orders == (Recipe.OnionSoup, Recipe.OnionSoup)
    assert onion.order_pool == (Recipe.OnionSoup,)

    solo = initial_state(small_layout, rng, agent_count=1)
    assert len(solo.agents) == 1
    with pytest.raises(LayoutError):
        initial_state(small_layout, rng, agent_count=3)


def test_observation_and_order_blindness(small_layout, make_state):
    state = make_state(small_layout, [((1, 1), LowAction.Up, None),
                                      ((2, 2), LowAction.Up, DISH)],
                       orders=(Recipe.OnionSoup, Recipe.OnionSoup))
    seen = observe(state, 0)
    assert seen.partner == state.agents[1]
    assert seen.partner_id == 1
    assert seen.for_agent(1).self_agent.held == DISH
    assert not seen.is_ordered(Recipe.TomatoSoup)
    assert goal_topdown(seen).probs == pytest.approx([1.0, 0.0], abs=1e-9)

    blind = observe(state, 1, order_blind=True)
    assert blind.orders == ()
    assert blind.is_ordered(Recipe.TomatoSoup)
    assert list(blind.order_distribution.values()) == [0.5, 0.5]
    assert goal_topdown(blind).probs == pytest.approx([0.5, 0.5])

    mixed = make_state(small_layout, [((1, 1), LowAction.Up, None)])
    assert goal_topdown(observe(mixed, 0)).probs == pytest.approx([0.5, 0.5])
    assert observe(mixed, 0).partner is None
    with pytest.raises(StructuralError):
        observe(mixed, 1)


def test_items_and_merging():
    assert CHOPPED_TOMATO.param == ItemParam.ChoppedTomato
    assert TOMATO_SALAD.param == ItemParam.Salad
    assert ONION.param == ItemParam.Onion
    assert str(ONION_SOUP) == 'Soup(Onion)'
    assert merge_items(CHOPPED_TOMATO, DISH) == TOMATO_SALAD
    assert merge_items(LETTUCE_SALAD, CHOPPED_TOMATO).contents == \
        frozenset({ItemKind.Tomato, ItemKind.Lettuce})
    assert merge_items(TOMATO_SALAD, CHOPPED_TOMATO) is None
    assert merge_items(DISH, DISH) is None


def test_salad_board_chops_instantly(make_state, rng):
    state = _salad_state(make_state, 'open_divider_tomato',
                         [((5, 1), LowAction.Right, Item(ItemKind.Tomato)),
                          ((4, 3), LowAction.Up, None)])
    new, rewards, success = step_salad(state, [LowAction.Interact, LowAction.Wait], rng)
    assert new.agents[0].held == CHOPPED_TOMATO
    assert rewards == [0.0, 0.0]
    assert not success


def test_salad_plating_on_counter(make_state, rng):
    state = _salad_state(make_state, 'open_divider_tomato',
                         [((5, 5), LowAction.Right, CHOPPED_TOMATO),
                          ((4, 3), LowAction.Up, None)])
    assert state.counters[(6, 5)] == DISH
    new, _, _ = step_salad(state, [LowAction.Interact, LowAction.Wait], rng)
    assert new.agents[0].held == TOMATO_SALAD
    assert (6, 5) not in new.counters


def test_tomato_task_success(make_state, rng):
    state = _salad_state(make_state, 'open_divider_tomato',
                         [((5, 3), LowAction.Right, TOMATO_SALAD),
                          ((2, 3), LowAction.Up, None)])
    new, rewards, success = step_salad(state, [LowAction.Interact, LowAction.Wait], rng)
    assert success and new.success
    assert rewards == [1.0, 1.0]
    assert new.orders == ()


def test_partial_salad_task_is_not_a_success(make_state, rng):
    state = _salad_state(make_state, 'open_divider_tomato_lettuce',
                         [((5, 3), LowAction.Right, LETTUCE_SALAD),
                          ((2, 3), LowAction.Up, None)])
    new, rewards, success = step_salad(state, [LowAction.Interact, LowAction.Wait], rng)
    assert not success
    assert rewards == [0.0, 0.0]
    assert new.orders == (Recipe.TomatoSalad,)
    assert new.delivered == (Recipe.LettuceSalad,)


def test_salad_not_in_task_is_refused(make_state, rng):
    state = _salad_state(make_state, 'open_divider_tomato',
                         [((5, 3), LowAction.Right, LETTUCE_SALAD),
                          ((2, 3), LowAction.Up, None)])
    new, _, success = step_salad(state, [LowAction.Interact, LowAction.Wait], rng)
    assert not success
    assert new.agents[0].held == LETTUCE_SALAD


def _units(state):
    """Ingredient and dish units anywhere in the kitchen, delivered ones
       included."""
    units = Counter()
    held = [agent.held for agent in state.agents if agent.held is not None]
    for item in held + list(state.counters.values()):
        if item.kind in (ItemKind.Tomato, ItemKind.Lettuce, ItemKind.Dish):
            units[item.kind] += 1
        elif item.kind == ItemKind.Chopped:
            units[item.ingredient] += 1
        elif item.kind == ItemKind.Salad:
            units[ItemKind.Dish] += 1
            units.update(item.contents)
    for recipe in state.delivered:
        units[ItemKind.Dish] += 1
        units.update(RI_ALL_LOOKUP[recipe].ingredient_set)
    return units


@pytest.mark.parametrize('name', ['open_divider_mixed', 'partial_divider_tomato_lettuce',
                                  'full_divider_tomato_lettuce'])
def test_salad_items_are_conserved(name, rng):
    state = initial_state(load_named_layout(name), rng)
    expected = _units(state)
    actions = list(LowAction)
    for _ in range(400):
        # Interact often enough for items to move around
        joint = [LowAction.Interact if rng.random() < 0.4
                 else actions[int(rng.integers(len(actions)))] for _ in state.agents]
        state, _, _ = step_salad(state, joint, rng)
        assert _units(state) == expected
