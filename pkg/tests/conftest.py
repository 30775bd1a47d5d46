"""Shared fixtures for the haicapy tests."""

import numpy as np
import pytest

from haicapy.enums import Domain, Recipe
from haicapy.kitchen import AgentInfo, KitchenState, PotState
from haicapy.layout import load_layout
from haicapy.recipe import domain_recipes

# Small soup kitchen: pot on top, onion / tomato / dish dispensers, serve
# tile on the right
SMALL_KITCHEN = (
    "name=small; domain=soup\n"
    "XXPXX\n"
    "O1  S\n"
    "X 2 D\n"
    "XXTXX\n"
)


@pytest.fixture
def rng():
    """Fixed random generator."""
    return np.random.default_rng(7)


@pytest.fixture
def small_layout():
    """Two agent soup kitchen with one pot."""
    return load_layout(SMALL_KITCHEN)


@pytest.fixture
def make_state():
    """Builds a KitchenState from agent (position, facing, held) triples."""

    def _make_state(layout, agents, pots=None, counters=None,
                    orders=(Recipe.OnionSoup, Recipe.TomatoSoup), pool=None):
        infos = [AgentInfo(position, facing, held) for position, facing, held in agents]
        if pots is None:
            pots = [PotState() for _ in layout.pots]
        if pool is None:
            pool = tuple(domain_recipes(Domain.Soup)) if layout.domain == Domain.Soup else ()
        return KitchenState(layout, infos, pots, counters or {}, orders, pool)

    return _make_state
