"""
This module provides the RecipeInfo class that contains all details for
a recipe, and declares fixed instances of each recipe the kitchen knows
about, plus the salad tasks built from them.
"""

from collections import OrderedDict
from typing import Any, Dict, FrozenSet, List, Optional, Tuple
from haicapy.const import (
    COOK_TIME_ONION, COOK_TIME_TOMATO, REWARD_ONION_SOUP, REWARD_TOMATO_SOUP)
from haicapy.enums import Domain, ItemKind, Recipe, SaladTask
from haicapy.util import serializable


class RecipeInfo(object):
    """Represents a recipe; ie. a goal an agent may work on."""

    def __init__(self, recipe: Recipe, description: str, domain: Domain,
                 ingredients: Tuple[ItemKind, ...], reward: float,
                 cook_time: Optional[int]):
        self._recipe = recipe
        self._description = description
        self._domain = domain
        self._ingredients = ingredients
        self._reward = reward
        self._cook_time = cook_time

    @property
    def cook_time(self) -> Optional[int]:
        """Steps a full pot needs to cook; None for salads."""
        return self._cook_time

    @property
    def description(self) -> str:
        """Description for the recipe."""
        return self._description

    @property
    def domain(self) -> Domain:
        """Domain the recipe belongs to."""
        return self._domain

    @property
    def ingredient_set(self) -> FrozenSet[ItemKind]:
        """Distinct raw ingredients used by the recipe."""
        return frozenset(self._ingredients)

    @property
    def ingredients(self) -> Tuple[ItemKind, ...]:
        """Raw ingredients required; soups list each of the three units."""
        return self._ingredients

    @property
    def recipe(self) -> Recipe:
        """Recipe identifier."""
        return self._recipe

    @property
    def reward(self) -> float:
        """Points awarded on delivery."""
        return self._reward

    def __repr__(self) -> str:
        return "<{}: recipe={}, description={}, ingredients={}, reward={}>".\
            format(self.__class__.__name__,
                   str(self._recipe),
                   self._description,
                   [str(item) for item in self._ingredients],
                   self._reward)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)


# Recipes
RI_ONION_SOUP = RecipeInfo(
    Recipe.OnionSoup, 'Onion soup', Domain.Soup,
    (ItemKind.Onion,) * 3, REWARD_ONION_SOUP, COOK_TIME_ONION)
RI_TOMATO_SOUP = RecipeInfo(
    Recipe.TomatoSoup, 'Tomato soup', Domain.Soup,
    (ItemKind.Tomato,) * 3, REWARD_TOMATO_SOUP, COOK_TIME_TOMATO)
RI_TOMATO_SALAD = RecipeInfo(
    Recipe.TomatoSalad, 'Tomato salad', Domain.Salad,
    (ItemKind.Tomato,), 0, None)
RI_LETTUCE_SALAD = RecipeInfo(
    Recipe.LettuceSalad, 'Lettuce salad', Domain.Salad,
    (ItemKind.Lettuce,), 0, None)
RI_MIXED_SALAD = RecipeInfo(
    Recipe.MixedSalad, 'Mixed salad', Domain.Salad,
    (ItemKind.Tomato, ItemKind.Lettuce), 0, None)

# List of all recipes
# Note: Order is important, as it is the goal order within each domain.
RI_ALL = [RI_ONION_SOUP, RI_TOMATO_SOUP, RI_TOMATO_SALAD, RI_LETTUCE_SALAD,
          RI_MIXED_SALAD]

# Dictionary of all recipes, for lookup using the recipe identifier
RI_ALL_LOOKUP = OrderedDict()
for ri in RI_ALL:
    RI_ALL_LOOKUP[ri.recipe] = ri

# Recipes that must all be delivered to complete each salad task
SALAD_TASK_RECIPES = {
    SaladTask.Tomato: (Recipe.TomatoSalad,),
    SaladTask.TomatoLettuce: (Recipe.TomatoSalad, Recipe.LettuceSalad),
    SaladTask.Mixed: (Recipe.MixedSalad,),
}


def domain_recipes(domain: Domain) -> List[Recipe]:
    """Recipes (goals) of the given domain, in goal order."""
    return [info.recipe for info in RI_ALL if info.domain == domain]


def soup_recipe_for(ingredient: ItemKind) -> Optional[Recipe]:
    """Soup recipe cooked from three of the given ingredient, if any."""
    return next((info.recipe for info in RI_ALL
                 if info.domain == Domain.Soup
                 and info.ingredients[0] == ingredient), None)


def salad_recipe_for(contents: FrozenSet[ItemKind]) -> Optional[Recipe]:
    """Salad recipe whose ingredient set equals the given contents, if any."""
    return next((info.recipe for info in RI_ALL
                 if info.domain == Domain.Salad
                 and info.ingredient_set == contents), None)


def parse_salad_task(text: str) -> SaladTask:
    """Parses a salad task name as used in layout headers and configs."""
    normalized = text.strip().lower().replace('+', '').replace('_', '')
    task = next((item for item in SaladTask
                 if item.name.lower() == normalized), None)
    if task is None:
        raise ValueError("Unknown salad task: {}".format(text))
    return task


def salad_task_key(task: SaladTask) -> str:
    """File-name friendly key for a salad task (eg. 'tomato_lettuce')."""
    return {SaladTask.Tomato: 'tomato',
            SaladTask.TomatoLettuce: 'tomato_lettuce',
            SaladTask.Mixed: 'mixed'}[task]
