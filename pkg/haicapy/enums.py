"""
This module contains all enumerations used by this library.
"""

from enum import IntEnum, IntFlag
from typing import TypeVar, List, Iterable, Optional, Tuple # pylint: disable=unused-import

T = TypeVar('T')


class IntEnumEx(IntEnum):
    """Extends IntEnum with some useful helper methods."""

    @classmethod
    def has_value(cls, value: int) -> bool:
        """True if specified value exists in int enum; otherwise, False."""
        return any(value == item.value for item in cls)

    @classmethod
    def parse_name(cls, name: str, default: T = None) -> T:
        """Parse specified name for IntEnum; return default if not found."""
        if not name:
            return default
        name = name.lower()
        return next((item for item in cls if name == item.name.lower()), default)

    @classmethod
    def parse_value(cls, value: int, default: T = None) -> T:
        """Parse specified value for IntEnum; return default if not found."""
        return next((item for item in cls if value == item.value), default)

    def __str__(self):
        """Provides just the name representation of enum."""
        return self.name


class IntFlagEx(IntFlag):
    """Extends IntFlag with some useful helper methods."""

    @classmethod
    def parse_names(cls, names: List[str]) -> T:
        """Parse specified names for IntFlag; raise if any is not found."""
        value = 0
        iterable = cls  # type: Iterable
        for name in names:
            name = name.lower()
            flag = next((item for item in iterable if name == item.name.lower()), None)
            if not flag:
                raise ValueError("{} is not a member of {}".format(
                    name, cls.__name__))
            value = value | int(flag)
        return cls(value)

    @property
    def names(self) -> List[str]:
        """Names of the individual flags that are set."""
        return [item.name for item in self.__class__
                if item.value and item in self]

    def __str__(self):
        """Provides just the name representation of the flags."""
        return '|'.join(self.names)


class LowAction(IntEnumEx):
    """Primitive action an agent can take in the kitchen.

    The four movement values double as facing directions; their order is
    the fixed expansion order used by the planner."""
    Up = 0
    Down = 1
    Left = 2
    Right = 3
    Interact = 4
    Wait = 5

    @property
    def is_movement(self) -> bool:
        """True for the four cardinal movement actions."""
        return self in MOVEMENT_ACTIONS

    @property
    def delta(self) -> Tuple[int, int]:
        """Grid offset (dx, dy) for a movement action; (0, 0) otherwise."""
        return _ACTION_DELTA.get(self, (0, 0))


MOVEMENT_ACTIONS = (LowAction.Up, LowAction.Down, LowAction.Left, LowAction.Right)

_ACTION_DELTA = {
    LowAction.Up: (0, -1),
    LowAction.Down: (0, 1),
    LowAction.Left: (-1, 0),
    LowAction.Right: (1, 0),
}


class Domain(IntEnumEx):
    """Kitchen domain an episode is played in."""
    Soup = 0
    Salad = 1


class TileKind(IntEnumEx):
    """Static kind of a kitchen grid tile."""
    Floor = 0
    Counter = 1
    Dispenser = 2
    Pot = 3
    CuttingBoard = 4
    ServeTile = 5


class ItemKind(IntEnumEx):
    """Kind of an item that can be held or placed."""
    Onion = 1
    Tomato = 2
    Lettuce = 3
    Dish = 4
    Soup = 5
    Chopped = 6
    Salad = 7

    @property
    def is_ingredient(self) -> bool:
        """True for raw ingredients."""
        return self in (ItemKind.Onion, ItemKind.Tomato, ItemKind.Lettuce)


class ItemParam(IntEnumEx):
    """Item parameter of an intention (the item it is about)."""
    Onion = 1
    Tomato = 2
    Lettuce = 3
    Dish = 4
    Soup = 5
    ChoppedTomato = 6
    ChoppedLettuce = 7
    Salad = 8


class Recipe(IntEnumEx):
    """Recipes that make up the goal layer of an agent."""
    OnionSoup = 1
    TomatoSoup = 2
    TomatoSalad = 3
    LettuceSalad = 4
    MixedSalad = 5


class SaladTask(IntEnumEx):
    """Salad domain tasks; each is a fixed list of recipes to deliver."""
    Tomato = 1
    TomatoLettuce = 2
    Mixed = 3


class IntentionKind(IntEnumEx):
    """High level action an agent can intend (in table order)."""
    GetItem = 1
    DropItem = 2
    InteractWithPot = 3
    InteractWithBoard = 4
    DeliverSoup = 5
    DeliverSalad = 6
    HandOver = 7
    Wait = 8


class PunishKind(IntEnumEx):
    """Reason for punishing an intention."""
    Abort = 1
    Repetition = 2


class Condition(IntFlagEx):
    """Experimental condition flags."""
    Standard = 0x0
    OrderBlindAgent2 = 0x1
    SwappedIntegration = 0x2
    Solo = 0x4

    @property
    def label(self) -> str:
        """File-name friendly label for the condition."""
        if not self.names:
            return 'standard'
        return '+'.join(_CONDITION_LABELS[name] for name in self.names)


_CONDITION_LABELS = {
    'OrderBlindAgent2': 'order_blind',
    'SwappedIntegration': 'swapped',
    'Solo': 'solo',
}
