"""
This module contains the Layout class, which describes the static geometry
of a kitchen, and the functions used to parse and validate layout files.

A layout file is a header line followed by an ASCII grid:

    name=forced; domain=soup
    XXXPX
    O X1P
    ...

Legend: 'X' counter, ' ' floor, 'O'/'T'/'L'/'D' onion, tomato, lettuce and
dish (dispensers in the soup domain, single placed items on a counter in
the salad domain), 'P' pot, 'C' cutting board, 'S' serve tile, '1'/'2'
spawn points (floor).

Agents start on their spawn points facing Up. A header entry such as
"facing=left" (all spawn points) or "facing=up,left" (one per spawn
point) overrides that.
"""

import logging
import os
import pkgutil
from collections import deque
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from haicapy.const import (
    LAYOUT_HEADER_SEPARATOR, LAYOUT_SUFFIX, SALAD_LAYOUTS, SOUP_LAYOUTS)
from haicapy.enums import Domain, ItemKind, LowAction, SaladTask, TileKind
from haicapy.exceptions import LayoutError
from haicapy.recipe import parse_salad_task, salad_task_key
from haicapy.util import serializable

_LOGGER = logging.getLogger(__name__)

Position = Tuple[int, int]

# Facing of agents on spawn points unless the header says otherwise
SPAWN_FACING = LowAction.Up

_ITEM_CHARS = {
    'O': ItemKind.Onion,
    'T': ItemKind.Tomato,
    'L': ItemKind.Lettuce,
    'D': ItemKind.Dish,
}

_TILE_CHARS = {
    'X': TileKind.Counter,
    ' ': TileKind.Floor,
    'P': TileKind.Pot,
    'C': TileKind.CuttingBoard,
    'S': TileKind.ServeTile,
    '1': TileKind.Floor,
    '2': TileKind.Floor,
}


def row_major(position: Position) -> Tuple[int, int]:
    """Sort key ordering positions row by row, then column by column."""
    return position[1], position[0]


class Layout(object):
    """Static geometry of a kitchen; positions are (x, y) tuples."""

    def __init__(self, name: str, domain: Domain, task: Optional[SaladTask],
                 tiles: Tuple[Tuple[TileKind, ...], ...],
                 items: Dict[Position, ItemKind],
                 spawn_points: List[Tuple[Position, LowAction]]):
        self._name = name
        self._domain = domain
        self._task = task
        self._tiles = tiles
        self._items = dict(items)
        self._spawn_points = list(spawn_points)
        self._height = len(tiles)
        self._width = len(tiles[0])
        self._pots = self._positions_of(TileKind.Pot)
        self._boards = self._positions_of(TileKind.CuttingBoard)
        self._serve_tiles = self._positions_of(TileKind.ServeTile)
        self._counters = self._positions_of(TileKind.Counter)
        self._dispensers = self._positions_of(TileKind.Dispenser)
        self._components = None  # type: Optional[List[FrozenSet[Position]]]

    #
    # PROPERTIES
    #

    @property
    def boards(self) -> List[Position]:
        """Cutting board positions; a board's id is its index."""
        return self._boards

    @property
    def counters(self) -> List[Position]:
        """Counter positions, in row-major order."""
        return self._counters

    @property
    def dispensers(self) -> Dict[Position, ItemKind]:
        """Dispenser positions and the item each provides (soup domain)."""
        return {position: self._items[position] for position in self._dispensers}

    @property
    def domain(self) -> Domain:
        """Domain the layout is played in."""
        return self._domain

    @property
    def height(self) -> int:
        """Number of rows."""
        return self._height

    @property
    def name(self) -> str:
        """Layout identifier."""
        return self._name

    @property
    def placed_items(self) -> Dict[Position, ItemKind]:
        """Items lying on counters at the start of an episode (salad domain)."""
        if self._domain != Domain.Salad:
            return {}
        return dict(self._items)

    @property
    def pots(self) -> List[Position]:
        """Pot positions; a pot's id is its index."""
        return self._pots

    @property
    def serve_tiles(self) -> List[Position]:
        """Serve tile positions."""
        return self._serve_tiles

    @property
    def spawn_points(self) -> List[Tuple[Position, LowAction]]:
        """(position, facing) for agent 1 and, if present, agent 2."""
        return self._spawn_points

    @property
    def task(self) -> Optional[SaladTask]:
        """Salad task the layout is stocked for; None in the soup domain."""
        return self._task

    @property
    def width(self) -> int:
        """Number of columns."""
        return self._width

    #
    # METHODS - Public
    #

    def in_bounds(self, position: Position) -> bool:
        """True if the position lies within the grid."""
        return 0 <= position[0] < self._width and 0 <= position[1] < self._height

    def tile(self, position: Position) -> TileKind:
        """Kind of the tile at the given position."""
        return self._tiles[position[1]][position[0]]

    def is_floor(self, position: Position) -> bool:
        """True if the position is in bounds and walkable."""
        return self.in_bounds(position) and self.tile(position) == TileKind.Floor

    def neighbors(self, position: Position) -> List[Position]:
        """In-bounds 4-neighbours, in Up, Down, Left, Right order."""
        result = []
        for action in (LowAction.Up, LowAction.Down, LowAction.Left, LowAction.Right):
            dx, dy = action.delta
            neighbor = (position[0] + dx, position[1] + dy)
            if self.in_bounds(neighbor):
                result.append(neighbor)
        return result

    def adjacent_floor(self, position: Position) -> List[Position]:
        """Floor tiles from which the given tile can be faced."""
        return [item for item in self.neighbors(position) if self.is_floor(item)]

    def floor_components(self) -> List[FrozenSet[Position]]:
        """Connected regions of floor, ordered by their first tile."""
        if self._components is None:
            seen = set()
            components = []
            for y in range(self._height):
                for x in range(self._width):
                    start = (x, y)
                    if start in seen or not self.is_floor(start):
                        continue
                    region = {start}
                    queue = deque([start])
                    while queue:
                        current = queue.popleft()
                        for neighbor in self.neighbors(current):
                            if neighbor not in region and self.is_floor(neighbor):
                                region.add(neighbor)
                                queue.append(neighbor)
                    seen |= region
                    components.append(frozenset(region))
            self._components = components
        return self._components

    def component_of(self, position: Position) -> Optional[FrozenSet[Position]]:
        """Floor region containing the given position, if any."""
        return next((region for region in self.floor_components()
                     if position in region), None)

    def touching_components(self, position: Position) -> List[int]:
        """Indexes of the floor regions adjacent to the given tile."""
        adjacent = set(self.adjacent_floor(position))
        return [index for index, region in enumerate(self.floor_components())
                if adjacent & region]

    def item_at(self, position: Position) -> Optional[ItemKind]:
        """Item a dispenser provides, or the item initially placed there."""
        return self._items.get(position)

    def __repr__(self) -> str:
        return "<{}: name={}, domain={}, task={}, size={}x{}, pots={}, spawns={}>".format(
            self.__class__.__name__,
            self._name,
            str(self._domain),
            str(self._task) if self._task else None,
            self._width,
            self._height,
            len(self._pots),
            len(self._spawn_points))

    def as_dict(self) -> Dict[str, Any]:
        """Converts to a dict of attributes for easier serialization."""
        return serializable(self)

    #
    # METHODS - Private / Internal
    #

    def _positions_of(self, kind: TileKind) -> List[Position]:
        return [(x, y)
                for y in range(self._height)
                for x in range(self._width)
                if self._tiles[y][x] == kind]


def _parse_header(line: str, layout_name: Optional[str]) -> Dict[str, str]:
    header = {}
    for part in line.split(LAYOUT_HEADER_SEPARATOR):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition('=')
        if not sep:
            raise LayoutError("Malformed header entry '{}'".format(part), layout_name)
        header[key.strip().lower()] = value.strip()
    unknown = set(header) - {'name', 'domain', 'task', 'facing'}
    if unknown:
        raise LayoutError("Unknown header keys: {}".format(
            ', '.join(sorted(unknown))), layout_name)
    return header


def _parse_facing(value: Optional[str], count: int, layout_name: str) -> List[LowAction]:
    if not value:
        return [SPAWN_FACING] * count
    facings = [LowAction.parse_name(part.strip()) for part in value.split(',')]
    if any(facing is None or not facing.is_movement for facing in facings):
        raise LayoutError("Spawn facing must be up, down, left or right: '{}'".format(value),
                          layout_name)
    if len(facings) == 1:
        facings *= count
    if len(facings) != count:
        raise LayoutError("Need one spawn facing, or one per spawn point ({})".format(count),
                          layout_name)
    return facings


def load_layout(text: str, name: Optional[str] = None) -> Layout:
    """
    Parses and validates a layout.

    :param text: layout file content; the header line is optional.
    :param name: name to use when the header does not provide one.
    :return the validated Layout.
    """
    lines = text.replace('\r\n', '\n').split('\n')
    while lines and not lines[-1].strip():
        lines.pop()
    header = {}  # type: Dict[str, str]
    if lines and '=' in lines[0]:
        header = _parse_header(lines.pop(0), name)
    name = header.get('name') or name or 'unnamed'

    domain = Domain.parse_name(header.get('domain', 'soup'))
    if domain is None:
        raise LayoutError("Unknown domain '{}'".format(header['domain']), name)
    task = None
    if header.get('task'):
        try:
            task = parse_salad_task(header['task'])
        except ValueError as ex:
            raise LayoutError(str(ex), name) from ex
    if domain == Domain.Salad and task is None:
        raise LayoutError("Salad layouts must name their task", name)

    if not lines:
        raise LayoutError("Layout has no grid", name)
    width = len(lines[0])
    if width == 0 or any(len(line) != width for line in lines):
        raise LayoutError("Grid is ragged; every row needs {} columns".format(width), name)

    tiles = []
    items = {}
    spawns = {}
    for y, line in enumerate(lines):
        row = []
        for x, char in enumerate(line):
            if char in _ITEM_CHARS:
                items[(x, y)] = _ITEM_CHARS[char]
                row.append(TileKind.Dispenser if domain == Domain.Soup else TileKind.Counter)
            elif char in _TILE_CHARS:
                row.append(_TILE_CHARS[char])
                if char in '12':
                    if char in spawns:
                        raise LayoutError("Spawn point {} appears twice".format(char), name)
                    spawns[char] = (x, y)
            else:
                raise LayoutError(
                    "Unknown character '{}' at ({}, {})".format(char, x, y), name)
        tiles.append(tuple(row))

    if '1' not in spawns or len(spawns) not in (1, 2):
        raise LayoutError("Layout needs spawn point 1 and optionally 2", name)
    facings = _parse_facing(header.get('facing'), len(spawns), name)
    spawn_points = [(spawns[key], facing) for key, facing in zip(sorted(spawns), facings)]

    layout = Layout(name, domain, task, tuple(tiles), items, spawn_points)
    _validate_named(layout)
    _warn_isolated_spawns(layout)
    _LOGGER.debug("Loaded %s", layout)
    return layout


def _warn_isolated_spawns(layout: Layout) -> None:
    stations = (list(layout.dispensers) + list(layout.placed_items) + layout.pots
                + layout.boards + layout.serve_tiles)
    for index, (position, _) in enumerate(layout.spawn_points):
        region = layout.component_of(position)
        if not any(set(layout.adjacent_floor(station)) & region for station in stations):
            _LOGGER.warning("Spawn %d of %s at %s cannot reach any workstation",
                            index + 1, layout.name, position)


def _validate_named(layout: Layout) -> None:
    validator = _NAMED_VALIDATORS.get(layout.name)
    if validator:
        validator(layout)


def _validate_forced(layout: Layout) -> None:
    components = layout.floor_components()
    if len(components) != 2:
        raise LayoutError("Forced layout needs exactly two floor regions; found {}".format(
            len(components)), layout.name)
    pot_sides = {tuple(layout.touching_components(pot)) for pot in layout.pots}
    ingredient_sides = {tuple(layout.touching_components(position))
                        for position, item in layout.dispensers.items()
                        if item.is_ingredient}
    if len(pot_sides) != 1 or len(next(iter(pot_sides))) != 1:
        raise LayoutError("Pots must all be reachable from one region only", layout.name)
    if len(ingredient_sides) != 1 or len(next(iter(ingredient_sides))) != 1:
        raise LayoutError("Ingredient dispensers must all be reachable from one region only",
                          layout.name)
    if pot_sides == ingredient_sides:
        raise LayoutError("Pots and ingredient dispensers must be on different regions",
                          layout.name)
    if not any(len(layout.touching_components(counter)) == 2
               for counter in layout.counters):
        raise LayoutError("No counter is shared by both regions", layout.name)


def _validate_asymmetric(layout: Layout) -> None:
    components = layout.floor_components()
    if len(components) != 2:
        raise LayoutError("Asymmetric layout needs two separate floor regions; found {}".format(
            len(components)), layout.name)
    for region in components:
        count = sum(1 for position, _ in layout.spawn_points if position in region)
        if count != 1:
            raise LayoutError("Each floor region must hold exactly one spawn point",
                              layout.name)
    shared = [pot for pot in layout.pots if len(layout.touching_components(pot)) == 2]
    if len(shared) < 2:
        raise LayoutError("Both regions must share access to two pots", layout.name)


_NAMED_VALIDATORS = {
    'forced': _validate_forced,
    'asymmetric': _validate_asymmetric,
}


def load_layout_file(path: str) -> Layout:
    """Loads a layout from a file; the file name is the fallback name."""
    name = os.path.basename(path)
    if name.endswith(LAYOUT_SUFFIX):
        name = name[:-len(LAYOUT_SUFFIX)]
    with open(path, 'r', encoding='utf-8') as handle:
        return load_layout(handle.read(), name)


def load_named_layout(name: str) -> Layout:
    """Loads one of the layouts shipped with the package."""
    data = None
    try:
        data = pkgutil.get_data('haicapy', 'layouts/' + name + LAYOUT_SUFFIX)
    except OSError:
        pass
    if data is None:
        raise LayoutError("No shipped layout with this name", name)
    return load_layout(data.decode('utf-8'), name)


def scenario_layout_name(base: str, task: Optional[SaladTask]) -> str:
    """Name of the shipped layout file for a layout and (salad) task."""
    if task is None:
        return base
    return '{}_{}'.format(base, salad_task_key(task))


def shipped_layout_names() -> List[str]:
    """Names of every layout shipped with the package."""
    names = list(SOUP_LAYOUTS)
    for base in SALAD_LAYOUTS:
        for task in SaladTask:
            names.append(scenario_layout_name(base, task))
    return names
