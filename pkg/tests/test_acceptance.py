"""Acceptance suite: one test per release criterion, each printing a
PASS line with its elapsed time (run with ``pytest -v -s``). Budgets are
asserted, not aspirational.
"""

import math
import time
from collections import Counter

import numpy as np
import pytest
import scipy.stats

from conftest import GOLDEN_PLAN, GOLDEN_TRACE
from mazetrace import codec
from mazetrace.analysis import ModelResponse, build_report, correlate
from mazetrace.dataset import Dataset, DatasetConfig, build_dataset, make_record
from mazetrace.generators import (
    ACYCLIC_KINDS,
    ALL_KINDS,
    DRUNKARD,
    FREESPACE,
    SEARCHFORMER,
    WILSON,
    GenConfig,
    derive_seed,
    gen_wilson,
    generate_cells,
    generate_instance,
)
from mazetrace.search import (
    FREE,
    Grid,
    Unsolvable,
    astar_trace,
    bfs_shortest_len,
    validate_plan,
)
from test_generators import free_graph


def _report(name: str, t0: float, budget: float):
    elapsed = time.monotonic() - t0
    assert elapsed < budget, f"{name}: {elapsed:.1f}s exceeded {budget}s budget"
    print(f"[ACCEPTANCE] {name}: PASS ({elapsed:.1f}s)")


def _kind_cfg(kind: str, size: int, seed: int) -> GenConfig:
    wall_levels = 4 if size >= 10 else 1
    return GenConfig(kind=kind, width=size, height=size, seed=seed,
                     wall_levels=wall_levels)


def test_golden_trace_exact():
    t0 = time.monotonic()
    cells = generate_cells(GenConfig(kind=FREESPACE, width=30, height=30,
                                     wall_levels=4))
    grid = Grid(30, 30, cells, (18, 11), (15, 12))
    result = astar_trace(grid)
    assert " ".join(codec.encode_trace(result.trace)) == GOLDEN_TRACE
    assert " ".join(codec.encode_plan(result.plan)) == GOLDEN_PLAN
    assert result.trace[0] == (("close"), (18, 11), 0, 4)
    assert result.trace[-1] == (("close"), (15, 12), 4, 0)
    assert result.difficulty == 25 and len(result.plan) == 5
    _report("golden-trace", t0, budget=1.0)


def test_oracle_equivalence():
    t0 = time.monotonic()
    checked = 0
    for kind in ALL_KINDS:
        for size, count in ((10, 1000), (30, 200)):
            for i in range(count):
                seed = derive_seed(1000 + size, i)
                inst = generate_instance(_kind_cfg(kind, size, seed))
                assert len(inst.plan) - 1 == bfs_shortest_len(inst.grid), \
                    (kind, size, i)
                checked += 1
    assert checked == 6 * 1200
    _report("oracle-equivalence", t0, budget=60.0)


def test_exhaustive_small_grids():
    t0 = time.monotonic()
    start, goal = (0, 0), (4, 4)
    agreements = 0
    for mask in range(2 ** 9):
        cells = np.zeros((5, 5), np.uint8)
        for bit in range(9):
            if mask >> bit & 1:
                cells[1 + bit // 3, 1 + bit % 3] = 1
        grid = Grid(5, 5, cells, start, goal)
        try:
            oracle = bfs_shortest_len(grid)
        except Unsolvable:
            with pytest.raises(Unsolvable):
                astar_trace(grid)
            continue
        result = astar_trace(grid)
        assert len(result.plan) - 1 == oracle, mask
        agreements += 1
    assert agreements == 512  # the free border keeps every layout solvable
    _report("exhaustive-5x5", t0, budget=10.0)


def test_wilson_uniformity():
    t0 = time.monotonic()
    counts = Counter()
    for seed in range(10_000):
        cells = gen_wilson(GenConfig(kind=WILSON, width=5, height=5, seed=seed))
        counts[cells.tobytes()] += 1
    assert len(counts) == 4  # the 2x2 node lattice has exactly 4 spanning trees
    freqs = [c / 10_000 for c in counts.values()]
    for f in freqs:
        assert 0.23 <= f <= 0.27, freqs
    chi2 = scipy.stats.chisquare(list(counts.values()))
    assert chi2.pvalue > 0.001, chi2
    _report("wilson-uniformity", t0, budget=10.0)


def test_structural_invariants():
    t0 = time.monotonic()
    for kind in ACYCLIC_KINDS:
        for seed in range(100):
            nodes, edges, connected = free_graph(
                generate_cells(GenConfig(kind=kind, seed=seed)))
            assert connected and edges == nodes - 1, (kind, seed)
    for seed in range(100):
        cells = generate_cells(GenConfig(kind=DRUNKARD, seed=seed))
        nodes, _, connected = free_graph(cells)
        assert connected and nodes == math.ceil(0.45 * 900), seed
    ids = set()
    for seed in range(100):
        inst = generate_instance(GenConfig(kind=SEARCHFORMER, seed=seed))
        frac = inst.grid.wall_count() / 900
        assert 0.30 <= frac <= 0.50, (seed, frac)
        assert bfs_shortest_len(inst.grid) >= 1
        ids.add(make_record(inst).id)
    assert len(ids) == 100
    _report("structural-invariants", t0, budget=60.0)


def test_codec_laws():
    t0 = time.monotonic()
    per_kind = math.ceil(1000 / len(ALL_KINDS))
    checked = 0
    for kind in ALL_KINDS:
        for i in range(per_kind):
            size = 10 if i % 2 else 30
            inst = generate_instance(_kind_cfg(kind, size, derive_seed(77, checked)))
            grid = inst.grid
            assert codec.decode_problem(
                codec.encode_problem(grid), size, size) == grid
            trace_tokens = codec.encode_trace(inst.trace)
            plan_tokens = codec.encode_plan(inst.plan)
            assert codec.decode_trace(trace_tokens) == inst.trace
            assert codec.decode_plan(plan_tokens) == inst.plan
            assert len(trace_tokens) == 5 * inst.difficulty
            assert len(plan_tokens) == 3 * len(inst.plan)
            parsed = codec.parse_response(trace_tokens + plan_tokens)
            assert parsed.plan == inst.plan
            assert parsed.intermediate_token_count == 5 * inst.difficulty
            checked += 1
    assert checked >= 1000
    _report("codec-laws", t0, budget=120.0)


def test_analyzer_golden():
    t0 = time.monotonic()
    records = []
    for i in range(200):
        records.append(make_record(generate_instance(
            _kind_cfg(WILSON, 10, derive_seed(5, i)))))
    records = list({r.id: r for r in records}.values())
    echoes = [ModelResponse(r.id, tuple(f"{r.trace} {r.plan}".split()), False)
              for r in records]
    report = build_report(records, echoes, limit=32_000)
    assert report.overall.valid_rate == 1.0
    assert report.overall.correlation.pearson_r == pytest.approx(1.0, abs=1e-12)

    rng = np.random.default_rng(20_240_817)
    x = rng.integers(5, 5000, size=10_000)
    y = rng.integers(5, 5000, size=10_000)
    noise = correlate(x, y)
    assert abs(noise.pearson_r) < 0.05

    hundred = []
    for i in range(1000):
        if len(hundred) == 100:
            break
        rec = make_record(generate_instance(_kind_cfg(FREESPACE, 30, derive_seed(6, i))))
        if rec.id not in {r.id for r in hundred}:
            hundred.append(rec)
    responses = []
    for i, rec in enumerate(hundred):
        if i < 5:
            responses.append(ModelResponse(
                rec.id, tuple(f"{rec.trace} {rec.plan}".split()), False))
        else:
            responses.append(ModelResponse(rec.id, ("close", "9", "9"), False))
    fixture = build_report(hundred, responses, limit=32_000)
    assert fixture.overall.valid_rate == 0.05
    _report("analyzer-golden", t0, budget=60.0)


def test_dataset_determinism(tmp_path):
    t0 = time.monotonic()
    cfg = DatasetConfig(counts=(("wilson", 60), ("drunkard", 40)),
                        width=10, height=10, seed=99, shard_size=64)
    digests = set()
    manifests = set()
    for run, workers in (("a", 1), ("b", 1), ("c", 8), ("d", 8)):
        m = build_dataset(cfg, tmp_path / run, workers=workers)
        digests.add(m["dataset_digest"])
        manifests.add((tmp_path / run / "manifest.json").read_bytes())
    assert len(digests) == 1 and len(manifests) == 1
    _report("dataset-determinism", t0, budget=120.0)


def test_scale_smoke_10k_wilson(tmp_path):
    t0 = time.monotonic()
    cfg = DatasetConfig(counts=(("wilson", 10_000),), seed=2024,
                        shard_size=2_500)
    manifest = build_dataset(cfg, tmp_path / "big", workers=1)
    assert manifest["total_records"] == 10_000
    assert len(manifest["shards"]) == 4
    ds = Dataset.load(tmp_path / "big")
    records = ds.records(verify=True)  # digest check on every shard
    assert len(records) == 10_000
    assert len({r.id for r in records}) == 10_000
    sample = records[::997]
    for rec in sample:
        grid = codec.decode_problem(rec.problem, 30, 30)
        assert validate_plan(grid, codec.decode_plan(rec.plan)).status \
            == "valid_optimal"
    _report("scale-smoke-10k", t0, budget=300.0)
