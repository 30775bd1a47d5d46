"""
This module contains utility functions used by various classes and modules.
"""

import hashlib
from collections.abc import Container, Iterable, Mapping # pylint: disable=unused-import
from enum import Enum, IntFlag
from typing import Any, Callable, Tuple

import numpy as np


def serializable(obj: Any, on_filter: Callable[[Any, str], bool] = None) -> Any:
    """
    Ensures the specified object is serializable, converting if necessary.

    :param obj: the object to use.
    :param on_filter: optional function that can be used to filter which
                      properties on the object will be included.
    :return value representing the object, which is serializable.
    """

    # Will be called recursively when object has children
    def _serializable(parent_obj: Any, obj: Any,
                      on_filter: Callable[[Any, str], bool]) -> Any:
        # None can be left as-is
        if obj is None:
            return obj

        # IntFlag enums should be broken down to a list of names
        elif isinstance(obj, IntFlag):
            value = str(obj)
            if not value:
                return None
            return value.split('|')

        # Any other enum just use the name
        elif isinstance(obj, Enum):
            return str(obj)

        # Simple types can be left as-is
        elif isinstance(obj, (bool, int, float, str)):
            return obj

        # Numpy scalars and arrays become plain python values
        elif isinstance(obj, np.generic):
            return obj.item()
        elif isinstance(obj, np.ndarray):
            return [_serializable(obj, item, on_filter=on_filter)
                    for item in obj.tolist()]

        # Named tuples are written out by field name
        elif isinstance(obj, tuple) and hasattr(obj, '_asdict'):
            return {key: _serializable(obj, value, on_filter=on_filter)
                    for key, value in obj._asdict().items()}

        # Class supports method to convert to serializable dictionary; use it
        elif hasattr(obj, 'as_dict') and parent_obj is not None:
            return obj.as_dict()

        elif isinstance(obj, Mapping):
            # Dictionaries will require us to check each key and value;
            # keys must end up as strings for JSON
            new_dict = {}
            for key, value in obj.items():
                new_key = _serializable(obj, key, on_filter=on_filter)
                if not isinstance(new_key, str):
                    new_key = str(new_key)
                new_dict[new_key] = _serializable(obj, value, on_filter=on_filter)
            return new_dict

        elif isinstance(obj, (list, tuple, Container)):
            # Lists will require us to check each item
            items = obj # type: Iterable
            new_list = []
            for item in items:
                new_list.append(_serializable(obj, item, on_filter=on_filter))
            return new_list

        # Convert to a dictionary of property name/values
        data = {}
        for name in dir(obj.__class__):
            if not isinstance(getattr(obj.__class__, name), property):
                continue
            elif on_filter and not on_filter(obj, name):
                continue
            value = getattr(obj, name)
            data[name] = _serializable(obj, value, on_filter=on_filter)
        return data

    return _serializable(None, obj, on_filter)


def stable_seed(*parts: Any) -> int:
    """Derives a 63-bit seed from the given parts.

    The parts are joined by their text representation, so the result is
    stable across processes and python versions (unlike hash())."""
    text = '|'.join(str(part) for part in parts)
    digest = hashlib.sha256(text.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big') >> 1


def manhattan(first: Tuple[int, int], second: Tuple[int, int]) -> int:
    """Manhattan distance between two grid positions."""
    return abs(first[0] - second[0]) + abs(first[1] - second[1])


def parse_float_range(text: str) -> Tuple[float, ...]:
    """Parses either 'start:stop:step' (inclusive of stop) or a comma
       separated list of values. Values are rounded to 6 decimals."""
    text = text.strip()
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError("Range must be given as start:stop:step")
        start, stop, step = (float(part) for part in parts)
        if step <= 0:
            raise ValueError("Range step must be positive")
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + index * step, 6) for index in range(count))
    return tuple(round(float(part), 6) for part in text.split(',') if part.strip())
