"""Tests for layout parsing and the shipped layouts."""

import pytest

from haicapy.const import SALAD_LAYOUTS, SOUP_LAYOUTS
from haicapy.enums import Domain, ItemKind, LowAction, SaladTask, TileKind
from haicapy.exceptions import LayoutError, StructuralError
from haicapy.layout import (
    load_layout, load_layout_file, load_named_layout, scenario_layout_name,
    shipped_layout_names)


def _flood(layout, start):
    region, stack = {start}, [start]
    while stack:
        x, y = stack.pop()
        for nxt in ((x, y - 1), (x, y + 1), (x - 1, y), (x + 1, y)):
            if nxt not in region and layout.is_floor(nxt):
                region.add(nxt)
                stack.append(nxt)
    return region


def test_minimal_grid():
    layout = load_layout("XXX\nX1X\nXXX")
    assert (layout.width, layout.height) == (3, 3)
    assert layout.spawn_points == [((1, 1), LowAction.Up)]
    assert layout.domain == Domain.Soup
    assert layout.name == 'unnamed'
    assert layout.tile((1, 1)) == TileKind.Floor
    assert layout.floor_components() == [frozenset({(1, 1)})]


def test_header_and_tiles(small_layout):
    assert small_layout.name == 'small'
    assert small_layout.pots == [(2, 0)]
    assert small_layout.serve_tiles == [(4, 1)]
    assert small_layout.dispensers == {
        (0, 1): ItemKind.Onion, (4, 2): ItemKind.Dish, (2, 3): ItemKind.Tomato}
    assert small_layout.placed_items == {}
    assert [position for position, _ in small_layout.spawn_points] == [(1, 1), (2, 2)]
    assert small_layout.adjacent_floor((2, 0)) == [(2, 1)]


@pytest.mark.parametrize('text', [
    "XXX\nX1\nXXX",
    "XXX\nX1Q\nXXX",
    "XXX\nX X\nXXX",
    "XXXX\nX11X\nXXXX",
    "name=x; colour=red\nXXX\nX1X\nXXX",
    "name=x; domain=salad\nXXX\nX1X\nXXX",
    "name=x; domain=soup\n",
])
def test_malformed_layouts(text):
    with pytest.raises(LayoutError):
        load_layout(text)


@pytest.mark.parametrize('facing, expected', [
    (None, [LowAction.Up, LowAction.Up]),
    ('left', [LowAction.Left, LowAction.Left]),
    ('Down, right', [LowAction.Down, LowAction.Right]),
])
def test_spawn_facing(facing, expected):
    header = "name=f" if facing is None else "name=f; facing={}".format(facing)
    layout = load_layout(header + "\nXXXXX\nX1 2X\nXXXXX")
    assert [direction for _, direction in layout.spawn_points] == expected


@pytest.mark.parametrize('facing', ['interact', 'north', 'up,left,down'])
def test_bad_spawn_facing(facing):
    with pytest.raises(LayoutError):
        load_layout("facing={}\nXXXXX\nX1 2X\nXXXXX".format(facing))


def test_layout_error_is_structural():
    with pytest.raises(StructuralError) as info:
        load_layout("XXX\nX1Q\nXXX", 'broken')
    assert info.value.layout_name == 'broken'
    assert 'broken' in str(info.value)


def test_forced_layout_must_be_split():
    text = (
        "name=forced\n"
        "XXXPX\n"
        "O  1P\n"
        "T2  X\n"
        "XXXSX\n")
    with pytest.raises(LayoutError):
        load_layout(text)


def test_shipped_forced_layout():
    layout = load_named_layout('forced')
    components = layout.floor_components()
    assert len(components) == 2
    for region in components:
        assert _flood(layout, next(iter(region))) == set(region)
    pot_side = {index for pot in layout.pots for index in layout.touching_components(pot)}
    ingredient_side = {index for position, item in layout.dispensers.items()
                       if item.is_ingredient
                       for index in layout.touching_components(position)}
    assert len(pot_side) == 1 and len(ingredient_side) == 1
    assert pot_side != ingredient_side
    # Pots on the right, dispensers on the left
    assert all(x > layout.width // 2 for x, _ in layout.pots)
    assert all(x == 0 for x, _ in layout.dispensers)


def test_shipped_asymmetric_layout():
    layout = load_named_layout('asymmetric')
    assert len(layout.floor_components()) == 2
    shared = [pot for pot in layout.pots if len(layout.touching_components(pot)) == 2]
    assert len(shared) >= 2


@pytest.mark.parametrize('name', shipped_layout_names())
def test_every_shipped_layout_loads(name):
    layout = load_named_layout(name)
    assert layout.name == name
    assert len(layout.spawn_points) == 2
    if name in SOUP_LAYOUTS:
        assert layout.domain == Domain.Soup
        assert layout.pots and layout.serve_tiles
    else:
        assert layout.domain == Domain.Salad
        assert layout.task is not None
        assert layout.boards and layout.serve_tiles
        assert layout.dispensers == {}
        assert ItemKind.Dish in layout.placed_items.values()


def test_shipped_layout_names():
    names = shipped_layout_names()
    assert names[:5] == list(SOUP_LAYOUTS)
    assert len(names) == len(SOUP_LAYOUTS) + 3 * len(SALAD_LAYOUTS)
    assert scenario_layout_name('open_divider', SaladTask.TomatoLettuce) == \
        'open_divider_tomato_lettuce'
    assert scenario_layout_name('ring', None) == 'ring'


def test_unknown_named_layout():
    with pytest.raises(LayoutError):
        load_named_layout('no_such_kitchen')


def test_load_layout_file(tmp_path):
    path = tmp_path / 'tiny.layout'
    path.write_text("XXXX\nO12S\nXXXX\n")
    layout = load_layout_file(str(path))
    assert layout.name == 'tiny'
    assert len(layout.spawn_points) == 2


def test_isolated_spawn_warns(caplog):
    layout = load_layout("XXXXX\nX1XO2\nXXXXX")
    messages = [record.getMessage() for record in caplog.records
                if record.levelname == 'WARNING']
    assert messages == ["Spawn 1 of unnamed at (1, 1) cannot reach any workstation"]
    assert len(layout.spawn_points) == 2
