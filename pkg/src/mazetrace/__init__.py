"""Maze generation, tracing A*, token codecs, dataset building, and response analysis."""

from mazetrace.search import (
    CLOSE,
    CREATE,
    FREE,
    WALL,
    Coord,
    Grid,
    Plan,
    PlanVerdict,
    SearchResult,
    Trace,
    TraceEvent,
    Unsolvable,
    astar_trace,
    bfs_shortest_len,
    difficulty,
    manhattan,
    neighbors_in_order,
    validate_plan,
    validate_trace,
)

__version__ = "0.1.0"
