"""
This module contains the exceptions raised by this library.

All of them derive from ValueError, so callers that only care about
malformed input can keep catching that.
"""

from typing import Optional


class HaicaError(ValueError):
    """Base class for all errors raised by haicapy."""


class StructuralError(HaicaError):
    """Inputs do not fit together; eg. distributions over different domains."""


class ConfigurationError(HaicaError):
    """A configuration value is missing, unknown or out of range."""


class LayoutError(StructuralError):
    """A layout file is malformed or violates its structural invariants."""

    def __init__(self, message: str, layout_name: Optional[str] = None):
        self._message = message
        self._layout_name = layout_name
        if layout_name:
            message = "Layout '{}': {}".format(layout_name, message)
        super().__init__(message)

    @property
    def layout_name(self) -> Optional[str]:
        """Name of the offending layout, if it was known."""
        return self._layout_name

    def __reduce__(self):
        return self.__class__, (self._message, self._layout_name)


class EpisodeError(HaicaError):
    """An episode failed while running as part of a sweep."""

    def __init__(self, message: str, episode_id: int, seed: int):
        self._message = message
        self._episode_id = episode_id
        self._seed = seed
        super().__init__("Episode {} (seed {}) failed: {}".format(
            episode_id, seed, message))

    @property
    def episode_id(self) -> int:
        """Identifier of the failed episode within its sweep."""
        return self._episode_id

    @property
    def seed(self) -> int:
        """Seed of the failed episode; use it to replay the episode."""
        return self._seed

    def __reduce__(self):
        return self.__class__, (self._message, self._episode_id, self._seed)
