import numpy as np
import pytest

from mazetrace.search import FREE, WALL, Grid

# Known-good free-space instance: 30x30, 4 outer wall rings, start (18,11),
# goal (15,12). The full 25-event trace and 5-cell plan below were derived
# by hand-simulating the fixed expansion order and are frozen as the golden
# fixture for the exact-match tests.
GOLDEN_TRACE = (
    "close 18 11 c0 c4 create 17 11 c1 c3 create 19 11 c1 c5 "
    "create 18 10 c1 c5 create 18 12 c1 c3 close 17 11 c1 c3 "
    "create 16 11 c2 c2 create 17 10 c2 c4 create 17 12 c2 c2 "
    "close 18 12 c1 c3 create 19 12 c2 c4 create 18 13 c2 c4 "
    "close 16 11 c2 c2 create 15 11 c3 c1 create 16 10 c3 c3 "
    "create 16 12 c3 c1 close 17 12 c2 c2 create 17 13 c3 c3 "
    "close 15 11 c3 c1 create 14 11 c4 c2 create 15 10 c4 c2 "
    "create 15 12 c4 c0 close 16 12 c3 c1 create 16 13 c4 c2 "
    "close 15 12 c4 c0"
)
GOLDEN_PLAN = "plan 18 11 plan 17 11 plan 16 11 plan 15 11 plan 15 12"
GOLDEN_PROBLEM_PREFIX = (
    "start 18 11 goal 15 12 wall 0 0 wall 0 1 wall 0 2 wall 0 3 wall 0 4 "
    "wall 0 5 wall 0 6 wall 0 7 wall 0 8 wall 0 9 wall 0 10 wall 0 11 "
    "wall 0 12 wall 0 13"
)


def freespace_cells(size: int = 30, levels: int = 4) -> np.ndarray:
    cells = np.full((size, size), WALL, dtype=np.uint8)
    cells[levels:size - levels, levels:size - levels] = FREE
    return cells


@pytest.fixture
def golden_grid() -> Grid:
    return Grid(30, 30, freespace_cells(), (18, 11), (15, 12))


def grid_from_art(art: str) -> Grid:
    """Build a grid from ASCII art: '.' free, '#' wall, 'S' start, 'G' goal."""
    rows = [line.strip() for line in art.strip().splitlines()]
    height = len(rows)
    width = len(rows[0])
    cells = np.zeros((height, width), dtype=np.uint8)
    start = goal = None
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch == "#":
                cells[y, x] = WALL
            elif ch == "S":
                start = (x, y)
            elif ch == "G":
                goal = (x, y)
    return Grid(width, height, cells, start, goal)


def random_grid(rng: np.random.Generator, width: int, height: int,
                wall_p: float) -> Grid | None:
    """Random grid with distinct free endpoints, or None if too few free cells."""
    cells = (rng.random((height, width)) < wall_p).astype(np.uint8)
    free = np.flatnonzero(cells.reshape(-1) == 0)
    if len(free) < 2:
        return None
    i, j = rng.choice(len(free), size=2, replace=False)
    s, g = int(free[i]), int(free[j])
    return Grid(width, height, cells,
                (s % width, s // width), (g % width, g // width))
