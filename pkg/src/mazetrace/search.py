"""Grid domain model, tracing A*, brute-force BFS oracle, and plan validation.

A* runs with f = g + h (Manhattan heuristic) and breaks ties FIFO by a
global insertion counter, which makes traces fully deterministic. Every
expansion is logged as a ``close`` event and every (re-)enqueue as a
``create`` event; the ordered event log is the per-instance difficulty
measure (difficulty = number of events).

The inner loop has two interchangeable backends: a compiled extension
(``mazetrace._astar_core``) and the pure-Python implementation below.
Both produce byte-identical traces; the compiled one is used when it
imported successfully and ``MAZETRACE_PURE`` is unset.
"""

from __future__ import annotations

import heapq
import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

Coord = tuple[int, int]  # (x, y) = (column, row)

FREE = 0
WALL = 1

CLOSE = "close"
CREATE = "create"

# Successor probe order; the trace layout depends on it, so it is fixed.
NEIGHBOR_OFFSETS = ((-1, 0), (1, 0), (0, -1), (0, 1))

try:  # compiled kernel is optional
    from mazetrace import _astar_core
except ImportError:  # pragma: no cover - depends on build environment
    _astar_core = None

HAVE_COMPILED_KERNEL = _astar_core is not None


def default_backend() -> str:
    if HAVE_COMPILED_KERNEL and not os.environ.get("MAZETRACE_PURE"):
        return "compiled"
    return "python"


class Unsolvable(Exception):
    """Raised when search exhausts the open list before reaching the goal.

    Carries the partial trace produced up to exhaustion so callers can
    still inspect or count the work done.
    """

    def __init__(self, message: str = "goal not reachable from start",
                 trace: "list[TraceEvent] | None" = None):
        super().__init__(message)
        self.trace: list[TraceEvent] = trace if trace is not None else []


class TraceEvent(NamedTuple):
    kind: str  # CLOSE or CREATE
    pos: Coord
    g: int
    h: int


Trace = list[TraceEvent]
Plan = list[Coord]


@dataclass(frozen=True, eq=False)
class Grid:
    """W x H lattice of free/wall cells with a start and a goal cell.

    ``cells`` is a uint8 array indexed ``[y, x]`` (0 = free, 1 = wall).
    The array is frozen after construction; instances are safe to share
    across threads.
    """

    width: int
    height: int
    cells: np.ndarray
    start: Coord
    goal: Coord

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be positive")
        cells = np.ascontiguousarray(self.cells, dtype=np.uint8)
        if cells.shape != (self.height, self.width):
            raise ValueError(
                f"cells shape {cells.shape} != (height, width) = "
                f"({self.height}, {self.width})")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "start", (int(self.start[0]), int(self.start[1])))
        object.__setattr__(self, "goal", (int(self.goal[0]), int(self.goal[1])))
        for name, c in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(c):
                raise ValueError(f"{name} {c} out of bounds")
            if not self.is_free(c):
                raise ValueError(f"{name} {c} is a wall cell")
        if self.start == self.goal:
            raise ValueError("start and goal must differ")
        cells.flags.writeable = False

    def in_bounds(self, c: Coord) -> bool:
        x, y = c
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, c: Coord) -> bool:
        x, y = c
        return self.cells[y, x] == FREE

    def wall_count(self) -> int:
        return int(self.cells.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and self.start == other.start and self.goal == other.goal
                and np.array_equal(self.cells, other.cells))


class SearchResult(NamedTuple):
    trace: Trace
    plan: Plan
    difficulty: int


class PlanVerdict(NamedTuple):
    status: str  # "valid_optimal" | "valid" | "invalid"
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.status != INVALID


VALID_OPTIMAL = "valid_optimal"
VALID = "valid"
INVALID = "invalid"


def manhattan(a: Coord, b: Coord) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def neighbors_in_order(grid: Grid, c: Coord) -> list[Coord]:
    """In-bounds free neighbors of ``c`` in the fixed probe order."""
    x, y = c
    out = []
    for dx, dy in NEIGHBOR_OFFSETS:
        nx, ny = x + dx, y + dy
        if 0 <= nx < grid.width and 0 <= ny < grid.height \
                and grid.cells[ny, nx] == FREE:
            out.append((nx, ny))
    return out


def _astar_python(cells: bytes, width: int, height: int,
                  start: Coord, goal: Coord):
    """Reference kernel. Returns (events, parents, solved, goal_node)."""
    sx, sy = start
    gx, gy = goal
    start_node = sy * width + sx
    goal_node = gy * width + gx

    best_g = [-1] * (width * height)
    parent = [-1] * (width * height)
    closed = bytearray(width * height)
    events: list[tuple[str, int, int, int, int]] = []
    heap: list[tuple[int, int, int, int]] = []  # (f, seq, node, g)
    seq = 0

    best_g[start_node] = 0
    heapq.heappush(heap, (manhattan(start, goal), seq, start_node, 0))
    seq += 1

    solved = False
    while heap:
        _, _, node, g = heapq.heappop(heap)
        if closed[node] or g != best_g[node]:
            continue  # re-closed or superseded entry
        closed[node] = 1
        x = node % width
        y = node // width
        h = abs(x - gx) + abs(y - gy)
        events.append((CLOSE, x, y, g, h))
        if node == goal_node:
            solved = True
            break
        g2 = g + 1
        for dx, dy in NEIGHBOR_OFFSETS:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < width and 0 <= ny < height):
                continue
            nb = ny * width + nx
            if cells[nb] or closed[nb]:
                continue
            old = best_g[nb]
            if old < 0 or g2 < old:
                best_g[nb] = g2
                parent[nb] = node
                nh = abs(nx - gx) + abs(ny - gy)
                heapq.heappush(heap, (g2 + nh, seq, nb, g2))
                seq += 1
                events.append((CREATE, nx, ny, g2, nh))
    return events, parent, solved


def _events_to_trace(raw: Iterable[tuple]) -> Trace:
    return [TraceEvent(kind, (x, y), g, h) for kind, x, y, g, h in raw]


def _plan_from_parents(parent, width: int, start: Coord, goal: Coord) -> Plan:
    node = goal[1] * width + goal[0]
    start_node = start[1] * width + start[0]
    cells = [goal]
    while node != start_node:
        node = parent[node]
        cells.append((node % width, node // width))
    cells.reverse()
    return cells


def astar_trace(grid: Grid, backend: str | None = None) -> SearchResult:
    """Run tracing A* on ``grid``; raise :class:`Unsolvable` with the
    partial trace if the goal is unreachable.

    ``backend`` forces "compiled" or "python"; by default the compiled
    kernel is used when available.
    """
    backend = backend or default_backend()
    cells = grid.cells.tobytes()
    if backend == "compiled":
        if _astar_core is None:
            raise RuntimeError("compiled kernel requested but not built")
        ev, plan_arr, solved = _astar_core.astar(
            cells, grid.width, grid.height,
            grid.start[0], grid.start[1], grid.goal[0], grid.goal[1])
        trace = [TraceEvent(CLOSE if k == 0 else CREATE, (x, y), g, h)
                 for k, x, y, g, h in ev.tolist()]
        if not solved:
            raise Unsolvable(trace=trace)
        plan = [(x, y) for x, y in plan_arr.tolist()]
    elif backend == "python":
        raw, parent, solved = _astar_python(
            cells, grid.width, grid.height, grid.start, grid.goal)
        trace = _events_to_trace(raw)
        if not solved:
            raise Unsolvable(trace=trace)
        plan = _plan_from_parents(parent, grid.width, grid.start, grid.goal)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return SearchResult(trace=trace, plan=plan, difficulty=len(trace))


def bfs_shortest_len(grid: Grid) -> int:
    """Shortest path length in moves, by plain breadth-first search.

    Kept deliberately independent of the A* kernels: it is the oracle
    they are checked against.
    """
    cells = grid.cells.tobytes()
    width, height = grid.width, grid.height
    start_node = grid.start[1] * width + grid.start[0]
    goal_node = grid.goal[1] * width + grid.goal[0]
    seen = bytearray(width * height)
    seen[start_node] = 1
    queue = deque([(start_node, 0)])
    while queue:
        node, d = queue.popleft()
        if node == goal_node:
            return d
        x = node % width
        y = node // width
        for dx, dy in NEIGHBOR_OFFSETS:
            nx, ny = x + dx, y + dy
            if 0 <= nx < width and 0 <= ny < height:
                nb = ny * width + nx
                if not cells[nb] and not seen[nb]:
                    seen[nb] = 1
                    queue.append((nb, d + 1))
    raise Unsolvable()


def validate_plan(grid: Grid, plan: Plan) -> PlanVerdict:
    """Judge an arbitrary plan against the grid.

    Returns the first violated rule; a valid plan is additionally
    checked for optimality against the BFS oracle.
    """
    if not plan:
        return PlanVerdict(INVALID, "empty plan")
    if tuple(plan[0]) != grid.start:
        return PlanVerdict(INVALID, f"wrong start {tuple(plan[0])}")
    prev = None
    for i, cell in enumerate(plan):
        cell = (int(cell[0]), int(cell[1]))
        if not grid.in_bounds(cell):
            return PlanVerdict(INVALID, f"cell {cell} out of bounds at step {i}")
        if not grid.is_free(cell):
            return PlanVerdict(INVALID, f"wall cell {cell} at step {i}")
        if prev is not None and manhattan(prev, cell) != 1:
            return PlanVerdict(INVALID, f"non-adjacent step {prev} -> {cell}")
        prev = cell
    if tuple(plan[-1]) != grid.goal:
        return PlanVerdict(INVALID, f"wrong terminus {tuple(plan[-1])}")
    if len(plan) - 1 == bfs_shortest_len(grid):
        return PlanVerdict(VALID_OPTIMAL)
    return PlanVerdict(VALID)


def difficulty(trace: Trace) -> int:
    """Number of events in the trace; the instance's difficulty measure."""
    if not trace:
        raise ValueError("difficulty of an empty trace is undefined")
    return len(trace)


def validate_trace(grid: Grid, trace: Trace) -> tuple[bool, str | None]:
    """Structural legality check of a trace against its grid.

    Used by the strict replay mode of response judging and by tests:
    first event must close the start at g=0, every other close needs a
    prior create at the same cell, no cell closes twice, h values must
    equal the Manhattan distance to the goal, and the f of successive
    closes must never decrease.
    """
    if not trace:
        return False, "empty trace"
    first = trace[0]
    if first.kind != CLOSE or tuple(first.pos) != grid.start or first.g != 0:
        return False, "first event must close the start at g=0"
    base = manhattan(grid.start, grid.goal)
    created = set()
    closed = set()
    last_close_f = -1
    for i, ev in enumerate(trace):
        pos = tuple(ev.pos)
        if not grid.in_bounds(pos) or not grid.is_free(pos):
            return False, f"event {i} on wall or out-of-bounds cell {pos}"
        if ev.g < 0 or ev.h != manhattan(pos, grid.goal):
            return False, f"event {i} has inconsistent costs"
        if ev.g + ev.h < base:
            return False, f"event {i} has f below start heuristic"
        if ev.kind == CREATE:
            created.add(pos)
        elif ev.kind == CLOSE:
            if pos in closed:
                return False, f"cell {pos} closed twice (event {i})"
            if i > 0 and pos not in created:
                return False, f"close without prior create at {pos} (event {i})"
            if ev.g + ev.h < last_close_f:
                return False, f"close f decreased at event {i}"
            last_close_f = ev.g + ev.h
            closed.add(pos)
        else:
            return False, f"unknown event kind {ev.kind!r}"
    return True, None
