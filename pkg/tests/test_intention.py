"""Tests for the intention space and its tables."""

import numpy as np
import pytest

from haicapy.enums import Domain, IntentionKind, ItemParam, Recipe
from haicapy.exceptions import StructuralError
from haicapy.intention import WAIT, Intention, IntentionSpace
from haicapy.layout import load_named_layout


@pytest.mark.parametrize('name, size', [
    ('cramped', 17),
    ('forced', 17),
    ('full_divider_tomato', 23),
])
def test_space_sizes(name, size):
    layout = load_named_layout(name)
    space = IntentionSpace(layout)
    assert len(space) == size
    assert space.intentions[-1] == WAIT
    assert space.domain == layout.domain


def test_soup_space_order(small_layout):
    space = IntentionSpace(small_layout)
    assert space.goals == [Recipe.OnionSoup, Recipe.TomatoSoup]
    assert space.intentions[0] == Intention(IntentionKind.GetItem, ItemParam.Onion)
    assert Intention(IntentionKind.InteractWithPot, 0) in space.intentions
    assert Intention(IntentionKind.InteractWithBoard, 0) not in space.intentions
    assert space.index(WAIT) == len(space) - 1


def test_salad_goals():
    space = IntentionSpace(load_named_layout('open_divider_mixed'))
    assert space.domain == Domain.Salad
    assert space.goals == [Recipe.TomatoSalad, Recipe.LettuceSalad, Recipe.MixedSalad]


@pytest.mark.parametrize('name', ['cramped', 'partial_divider_tomato_lettuce'])
def test_tables_are_stochastic(name):
    space = IntentionSpace(load_named_layout(name))
    down = space.intention_given_goal
    up = space.goal_given_intention
    assert down.shape == (len(space.goals), len(space))
    assert up.shape == (len(space), len(space.goals))
    assert np.allclose(down.rows.sum(axis=1), 1.0)
    assert np.allclose(up.rows.sum(axis=1), 1.0)
    # Both tables share the same relevance pattern
    assert np.array_equal(down.rows > 0, up.rows.T > 0)


def test_relevance(small_layout):
    space = IntentionSpace(small_layout)
    rows = space.intention_given_goal.rows
    onion, tomato = 0, 1
    get_tomato = space.index(Intention(IntentionKind.GetItem, ItemParam.Tomato))
    get_dish = space.index(Intention(IntentionKind.GetItem, ItemParam.Dish))
    deliver_onion = space.index(Intention(IntentionKind.DeliverSoup, Recipe.OnionSoup))
    assert rows[onion, get_tomato] == 0
    assert rows[tomato, get_tomato] > 0
    assert rows[onion, get_dish] == rows[tomato, get_dish] > 0
    assert rows[tomato, deliver_onion] == 0
    assert rows[onion, space.index(WAIT)] > 0


def test_foreign_intention(small_layout):
    space = IntentionSpace(small_layout)
    with pytest.raises(StructuralError):
        space.index(Intention(IntentionKind.InteractWithBoard, 0))
    with pytest.raises(StructuralError):
        space.index(Intention(IntentionKind.InteractWithPot, 5))


def test_uniform_beliefs(small_layout):
    space = IntentionSpace(small_layout)
    assert space.uniform_goals().probs == pytest.approx([0.5, 0.5])
    assert space.uniform_intentions().size == len(space) == 16
