"""
This module contains the IntentionChangedInfo class.
"""

from typing import Any, Dict, Optional
from haicapy.enums import PunishKind
from haicapy.intention import Intention
from haicapy.util import serializable


class IntentionChangedInfo(object):
    """Provides details for a change of an agent's active intention."""

    def __init__(self, step_count: int, old_intention: Intention,
                 new_intention: Intention, completed: bool,
                 punishment: Optional[PunishKind]):
        self._step_count = step_count
        self._old_intention = old_intention
        self._new_intention = new_intention
        self._completed = completed
        self._punishment = punishment

    #
    # PROPERTIES
    #

    @property
    def completed(self) -> bool:
        """True if the old intention had been completed."""
        return self._completed

    @property
    def new_intention(self) -> Intention:
        """The intention now active."""
        return self._new_intention

    @property
    def old_intention(self) -> Intention:
        """The intention that was active before."""
        return self._old_intention

    @property
    def punishment(self) -> Optional[PunishKind]:
        """Punishment applied to the old intention, if any."""
        return self._punishment

    @property
    def step_count(self) -> int:
        """Kitchen step at which the change happened."""
        return self._step_count

    #
    # METHODS - Public
    #

    def __repr__(self) -> str:
        return "<{}: step_count={}, old_intention={}, new_intention={}, " \
               "completed={}, punishment={}>".\
            format(self.__class__.__name__,
                   self._step_count,
                   str(self._old_intention),
                   str(self._new_intention),
                   self._completed,
                   str(self._punishment) if self._punishment else None)

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)
