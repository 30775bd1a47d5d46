"""Tests for utilities, enums and recipes."""

import numpy as np
import pytest

from haicapy.enums import Condition, Domain, ItemKind, LowAction, Recipe, SaladTask
from haicapy.recipe import (
    RI_ALL_LOOKUP, domain_recipes, parse_salad_task, salad_recipe_for, salad_task_key,
    soup_recipe_for)
from haicapy.util import manhattan, parse_float_range, serializable, stable_seed


def test_parse_float_range():
    grid = parse_float_range('0:1:0.1')
    assert len(grid) == 11
    assert grid[0] == 0.0 and grid[-1] == 1.0
    assert grid[3] == 0.3
    assert parse_float_range('0, 0.5,1') == (0.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        parse_float_range('0:1')
    with pytest.raises(ValueError):
        parse_float_range('0:1:0')


def test_stable_seed():
    seed = stable_seed(0, 'cramped', 0.1, 'standard', 4)
    assert seed == stable_seed(0, 'cramped', 0.1, 'standard', 4)
    assert seed != stable_seed(0, 'cramped', 0.1, 'order_blind', 4)
    assert 0 <= seed < 2 ** 63


def test_manhattan():
    assert manhattan((1, 2), (4, 0)) == 5


def test_serializable():
    data = serializable({'recipe': RI_ALL_LOOKUP[Recipe.OnionSoup],
                         'flags': Condition.OrderBlindAgent2 | Condition.Solo,
                         'vector': np.array([0.25, 0.75]),
                         'kind': ItemKind.Dish,
                         'count': np.int64(3)})
    assert data['recipe']['reward'] == 20
    assert data['recipe']['recipe'] == 'OnionSoup'
    assert data['flags'] == ['OrderBlindAgent2', 'Solo']
    assert data['vector'] == [0.25, 0.75]
    assert data['kind'] == 'Dish'
    assert data['count'] == 3 and isinstance(data['count'], int)


def test_enum_helpers():
    assert Domain.parse_name('SALAD') == Domain.Salad
    assert Domain.parse_name('pasta') is None
    assert LowAction.Left.is_movement
    assert not LowAction.Interact.is_movement
    assert LowAction.Up.delta == (0, -1)
    assert LowAction.Wait.delta == (0, 0)
    assert str(LowAction.Right) == 'Right'


def test_recipes():
    assert domain_recipes(Domain.Soup) == [Recipe.OnionSoup, Recipe.TomatoSoup]
    assert soup_recipe_for(ItemKind.Tomato) == Recipe.TomatoSoup
    assert soup_recipe_for(ItemKind.Lettuce) is None
    assert salad_recipe_for(frozenset({ItemKind.Lettuce, ItemKind.Tomato})) == \
        Recipe.MixedSalad
    assert RI_ALL_LOOKUP[Recipe.TomatoSoup].cook_time == 15
    assert RI_ALL_LOOKUP[Recipe.OnionSoup].cook_time == 20


@pytest.mark.parametrize('text, task', [
    ('tomato', SaladTask.Tomato),
    ('tomato_lettuce', SaladTask.TomatoLettuce),
    ('Tomato+Lettuce', SaladTask.TomatoLettuce),
    ('mixed', SaladTask.Mixed),
])
def test_parse_salad_task(text, task):
    assert parse_salad_task(text) == task


def test_salad_task_key():
    assert salad_task_key(SaladTask.TomatoLettuce) == 'tomato_lettuce'
    with pytest.raises(ValueError):
        parse_salad_task('soup')
