"""Six problem generators plus endpoint sampling and instance assembly.

Three acyclic kinds (wilson, kruskal, dfs) carve spanning trees over a
node lattice embedded at odd grid coordinates, so their free-cell graph
is connected and cycle-free. Two cave kinds (drunkard, searchformer)
permit cycles. freespace keeps only an outer wall band.

All randomness flows through a numpy PCG64 generator; fixed (kind, seed,
dims, params) give byte-identical grids. Batch workers derive
per-instance seeds with :func:`derive_seed`, which hashes
(master_seed, instance_index) so generation order and worker count do
not matter.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace

import numpy as np

from mazetrace.search import (
    FREE,
    WALL,
    Coord,
    Grid,
    Plan,
    SearchResult,
    Trace,
    Unsolvable,
    astar_trace,
)

WILSON = "wilson"
KRUSKAL = "kruskal"
DFS = "dfs"
DRUNKARD = "drunkard"
SEARCHFORMER = "searchformer"
FREESPACE = "freespace"

ALL_KINDS = (WILSON, KRUSKAL, DFS, DRUNKARD, SEARCHFORMER, FREESPACE)
ACYCLIC_KINDS = (WILSON, KRUSKAL, DFS)


class TooFewFreeCells(ValueError):
    """Grid has fewer than two free cells; endpoints cannot be sampled."""


class RejectionBudgetExceeded(RuntimeError):
    """Rejection sampling ran out of attempts."""


@dataclass(frozen=True)
class GenConfig:
    kind: str
    width: int = 30
    height: int = 30
    seed: int = 0
    floor_fraction: float = 0.45           # drunkard stopping rule
    wall_fraction_range: tuple[float, float] = (0.30, 0.50)  # searchformer
    wall_levels: int = 4                   # freespace outer band
    min_difficulty: int = 10               # searchformer "too easy" cutoff
    max_attempts: int = 10_000             # searchformer rejection budget

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.width < 5 or self.height < 5:
            raise ValueError("grid dimensions must be >= 5")
        if not 0.0 < self.floor_fraction < 1.0:
            raise ValueError("floor_fraction must be in (0, 1)")
        lo, hi = self.wall_fraction_range
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError("wall_fraction_range must be ordered within [0, 1]")
        if self.kind == FREESPACE:
            if self.wall_levels < 1:
                raise ValueError("wall_levels must be >= 1")
            if (self.width - 2 * self.wall_levels < 2
                    or self.height - 2 * self.wall_levels < 2):
                raise ValueError("wall_levels leaves no >=2x2 inner grid")
        if self.min_difficulty < 1:
            raise ValueError("min_difficulty must be >= 1")


@dataclass(frozen=True)
class ProblemInstance:
    grid: Grid
    trace: Trace
    plan: Plan
    difficulty: int
    kind: str
    seed: int


def derive_seed(master_seed: int, *indices: int) -> int:
    """Stable 64-bit per-instance seed from the master seed and indices."""
    text = ":".join([str(master_seed)] + [str(i) for i in indices])
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.Generator(np.random.PCG64(seed_or_rng))


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:  # path compression
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        return True


# --- node lattice shared by the spanning-tree kinds ----------------------
#
# Node (i, j) sits at grid cell (2i+1, 2j+1); carving the edge between
# adjacent nodes frees the cell between them. Everything else stays wall.

def lattice_dims(width: int, height: int) -> tuple[int, int]:
    return (width - 1) // 2, (height - 1) // 2


def _lattice_edges(nw: int, nh: int) -> list[tuple[int, int]]:
    """All node-lattice edges as (node, node) pairs, fixed enumeration."""
    edges = []
    for j in range(nh):
        for i in range(nw):
            u = j * nw + i
            if i + 1 < nw:
                edges.append((u, u + 1))
            if j + 1 < nh:
                edges.append((u, u + nw))
    return edges


def _carve_lattice(width: int, height: int, nw: int, nh: int,
                   edges: list[tuple[int, int]]) -> np.ndarray:
    cells = np.full((height, width), WALL, dtype=np.uint8)
    for node in range(nw * nh):
        i, j = node % nw, node // nw
        cells[2 * j + 1, 2 * i + 1] = FREE
    for u, v in edges:
        ui, uj = u % nw, u // nw
        vi, vj = v % nw, v // nw
        cells[uj + vj + 1, ui + vi + 1] = FREE  # midpoint of the two node cells
    return cells


def _node_neighbors(node: int, nw: int, nh: int) -> list[int]:
    i, j = node % nw, node // nw
    out = []
    if i > 0:
        out.append(node - 1)
    if i + 1 < nw:
        out.append(node + 1)
    if j > 0:
        out.append(node - nw)
    if j + 1 < nh:
        out.append(node + nw)
    return out


def gen_wilson(cfg: GenConfig, rng=None) -> np.ndarray:
    """Uniform spanning tree by loop-erased random walks.

    From each not-yet-attached node, walk randomly until hitting the
    tree, remembering only the last exit direction per visited node;
    retracing those pointers yields the loop-erased path which is then
    attached. The resulting tree is a uniform sample over all spanning
    trees of the lattice.
    """
    rng = _rng(cfg.seed if rng is None else rng)
    nw, nh = lattice_dims(cfg.width, cfg.height)
    n = nw * nh
    in_tree = bytearray(n)
    nxt = [-1] * n
    in_tree[0] = 1
    edges: list[tuple[int, int]] = []
    for u0 in range(n):
        if in_tree[u0]:
            continue
        u = u0
        while not in_tree[u]:
            nbrs = _node_neighbors(u, nw, nh)
            v = nbrs[rng.integers(len(nbrs))]
            nxt[u] = v
            u = v
        u = u0
        while not in_tree[u]:
            in_tree[u] = 1
            edges.append((u, nxt[u]))
            u = nxt[u]
    return _carve_lattice(cfg.width, cfg.height, nw, nh, edges)


def gen_kruskal(cfg: GenConfig, rng=None) -> np.ndarray:
    """Random-order edge insertion with union-find cycle rejection."""
    rng = _rng(cfg.seed if rng is None else rng)
    nw, nh = lattice_dims(cfg.width, cfg.height)
    all_edges = _lattice_edges(nw, nh)
    order = rng.permutation(len(all_edges))
    uf = UnionFind(nw * nh)
    edges = [all_edges[i] for i in order if uf.union(*all_edges[i])]
    return _carve_lattice(cfg.width, cfg.height, nw, nh, edges)


def gen_dfs_backtracker(cfg: GenConfig, rng=None) -> np.ndarray:
    """Randomized depth-first carving with backtracking at dead ends."""
    rng = _rng(cfg.seed if rng is None else rng)
    nw, nh = lattice_dims(cfg.width, cfg.height)
    n = nw * nh
    visited = bytearray(n)
    stack = [int(rng.integers(n))]
    visited[stack[0]] = 1
    edges: list[tuple[int, int]] = []
    while stack:
        u = stack[-1]
        nbrs = [v for v in _node_neighbors(u, nw, nh) if not visited[v]]
        if not nbrs:
            stack.pop()
            continue
        v = nbrs[rng.integers(len(nbrs))]
        visited[v] = 1
        edges.append((u, v))
        stack.append(v)
    return _carve_lattice(cfg.width, cfg.height, nw, nh, edges)


def gen_drunkard(cfg: GenConfig, rng=None) -> np.ndarray:
    """Random-walk cave carving until the floor-fraction target is met.

    The walk is confined to the interior so the outer ring stays wall;
    the carved region is connected by construction and may contain
    cycles. Stops the moment floor count reaches
    ceil(floor_fraction * width * height), capped by the interior size.
    """
    rng = _rng(cfg.seed if rng is None else rng)
    w, h = cfg.width, cfg.height
    cells = np.full((h, w), WALL, dtype=np.uint8)
    interior = (w - 2) * (h - 2)
    target = min(math.ceil(cfg.floor_fraction * w * h), interior)
    x = int(rng.integers(1, w - 1))
    y = int(rng.integers(1, h - 1))
    cells[y, x] = FREE
    carved = 1
    offs = ((-1, 0), (1, 0), (0, -1), (0, 1))
    while carved < target:
        dx, dy = offs[rng.integers(4)]
        nx, ny = x + dx, y + dy
        if 1 <= nx <= w - 2 and 1 <= ny <= h - 2:
            x, y = nx, ny
            if cells[y, x] == WALL:
                cells[y, x] = FREE
                carved += 1
    return cells


def gen_freespace(cfg: GenConfig, rng=None) -> np.ndarray:
    """Outer band of ``wall_levels`` wall rings around an all-free interior."""
    w, h, lv = cfg.width, cfg.height, cfg.wall_levels
    cells = np.full((h, w), WALL, dtype=np.uint8)
    cells[lv:h - lv, lv:w - lv] = FREE
    return cells


def _searchformer_draw(cfg: GenConfig, rng: np.random.Generator,
                       backend: str | None = None):
    """One rejection-sampling draw; returns (grid, result) or None."""
    w, h = cfg.width, cfg.height
    n = w * h
    lo, hi = cfg.wall_fraction_range
    p = rng.uniform(lo, hi)
    wall_count = int(p * n)
    if wall_count > n - 2:
        return None
    perm = rng.permutation(n)
    cells = np.zeros(n, dtype=np.uint8)
    cells[perm[:wall_count]] = WALL
    s, g = int(perm[wall_count]), int(perm[wall_count + 1])
    grid = Grid(w, h, cells.reshape(h, w),
                (s % w, s // w), (g % w, g // w))
    try:
        result = astar_trace(grid, backend=backend)
    except Unsolvable:
        return None
    if result.difficulty < cfg.min_difficulty:
        return None
    return grid, result


def _searchformer_instance(cfg: GenConfig, rng: np.random.Generator,
                           dedupe_keys: set | None = None,
                           backend: str | None = None):
    """Rejection loop per the searchformer recipe.

    Walls are the first floor(p*W*H) cells of one uniform permutation
    and start/goal the next two, so all draws are uniform without
    replacement. Unsolvable, too-easy (difficulty < min_difficulty) and
    duplicate draws are rejected; ``dedupe_keys`` holds the canonical
    problem serializations already accepted in the batch.
    """
    from mazetrace.codec import encode_problem, tokens_to_text

    for _ in range(cfg.max_attempts):
        drawn = _searchformer_draw(cfg, rng, backend)
        if drawn is None:
            continue
        grid, result = drawn
        if dedupe_keys is not None:
            key = hashlib.sha256(
                tokens_to_text(encode_problem(grid)).encode()).hexdigest()
            if key in dedupe_keys:
                continue
            dedupe_keys.add(key)
        return grid, result
    raise RejectionBudgetExceeded(
        f"no acceptable searchformer instance in {cfg.max_attempts} attempts")


def gen_searchformer(cfg: GenConfig, rng=None,
                     dedupe_keys: set | None = None) -> Grid:
    """Accepted searchformer-style grid, endpoints included."""
    rng = _rng(cfg.seed if rng is None else rng)
    grid, _ = _searchformer_instance(cfg, rng, dedupe_keys)
    return grid


def sample_endpoints(cells: np.ndarray, seed_or_rng) -> Grid:
    """Attach a uniformly drawn (start, goal) pair to an endpoint-less grid."""
    rng = _rng(seed_or_rng)
    height, width = cells.shape
    free = np.flatnonzero(cells.reshape(-1) == FREE)
    if len(free) < 2:
        raise TooFewFreeCells(f"need >= 2 free cells, found {len(free)}")
    i, j = rng.choice(len(free), size=2, replace=False)
    s, g = int(free[i]), int(free[j])
    return Grid(width, height, cells,
                (s % width, s // width), (g % width, g // width))


_CELL_GENERATORS = {
    WILSON: gen_wilson,
    KRUSKAL: gen_kruskal,
    DFS: gen_dfs_backtracker,
    DRUNKARD: gen_drunkard,
    FREESPACE: gen_freespace,
}


def generate_cells(cfg: GenConfig, rng=None) -> np.ndarray:
    """Endpoint-less cell array for any non-searchformer kind."""
    try:
        gen = _CELL_GENERATORS[cfg.kind]
    except KeyError:
        raise ValueError(f"{cfg.kind} embeds its own endpoint loop; "
                         "use gen_searchformer") from None
    return gen(cfg, rng)


def generate_instance(cfg: GenConfig, dedupe_keys: set | None = None,
                      backend: str | None = None) -> ProblemInstance:
    """Compose generator, endpoint sampling, and tracing A*.

    Every kind yields a solvable grid by construction (spanning trees
    and drunkard caves are connected; freespace interiors are convex;
    searchformer rejects unsolvable draws), so the result always
    carries a plan.
    """
    rng = _rng(cfg.seed)
    if cfg.kind == SEARCHFORMER:
        grid, result = _searchformer_instance(cfg, rng, dedupe_keys, backend)
    else:
        cells = generate_cells(cfg, rng)
        grid = sample_endpoints(cells, rng)
        result = astar_trace(grid, backend=backend)
    return ProblemInstance(grid=grid, trace=result.trace, plan=result.plan,
                           difficulty=result.difficulty, kind=cfg.kind,
                           seed=cfg.seed)


def instance_for_index(cfg: GenConfig, master_seed: int,
                       index: int, attempt: int = 0,
                       backend: str | None = None) -> ProblemInstance:
    """Instance ``index`` of a batch, reproducible from its own seed."""
    seed = derive_seed(master_seed, index) if attempt == 0 \
        else derive_seed(master_seed, index, attempt)
    return generate_instance(replace(cfg, seed=seed), backend=backend)
