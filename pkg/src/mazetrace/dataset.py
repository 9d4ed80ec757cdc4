"""Batch dataset construction: generate, dedupe, shard, split, manifest.

Shard layout: first line is a JSON header (dimensions, per-line kinds
as run-length pairs, per-line seeds), followed by one record per line
with three tab-separated fields: problem, trace, and plan token
strings. The manifest records the config echo, shard digests, a whole
dataset digest, and the holdout split.

Instance seeds derive from (master_seed, global_index), so shard and
manifest bytes are a pure function of the config regardless of worker
count.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from mazetrace import codec
from mazetrace.generators import (
    ALL_KINDS,
    SEARCHFORMER,
    GenConfig,
    ProblemInstance,
    derive_seed,
    generate_instance,
)

MANIFEST_NAME = "manifest.json"
SHARD_FORMAT = "mazetrace-shard-v1"
MANIFEST_FORMAT = "mazetrace-manifest-v1"

WORKERS_ENV = "MAZETRACE_WORKERS"


class DigestMismatch(ValueError):
    """Shard bytes do not match the recorded digest."""


class ShardParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class InsufficientInstances(ValueError):
    """Holdout request exceeds the available instances of some kind."""


class GenerationError(RuntimeError):
    """Generator failure, annotated with the failing instance slot."""

    def __init__(self, index: int, kind: str, cause: Exception):
        super().__init__(f"instance {index} ({kind}): {cause}")
        self.index = index
        self.kind = kind


@dataclass(frozen=True)
class InstanceRecord:
    id: str          # sha256 of the problem token string
    kind: str
    seed: int
    problem: str
    trace: str
    plan: str
    difficulty: int
    plan_len: int
    width: int
    height: int


@dataclass(frozen=True)
class DatasetConfig:
    counts: tuple[tuple[str, int], ...]  # (kind, count) in generation order
    width: int = 30
    height: int = 30
    seed: int = 0
    shard_size: int = 50_000
    floor_fraction: float = 0.45
    wall_fraction_range: tuple[float, float] = (0.30, 0.50)
    wall_levels: int = 4
    min_difficulty: int = 10
    max_attempts: int = 10_000

    def __post_init__(self):
        for kind, count in self.counts:
            if kind not in ALL_KINDS:
                raise ValueError(f"unknown generator kind {kind!r}")
            if count < 1:
                raise ValueError(f"count for {kind} must be positive")
        if self.shard_size < 1:
            raise ValueError("shard_size must be positive")
        for kind, _ in self.counts:  # surface dimension/parameter errors early
            self.gen_config(kind)

    def gen_config(self, kind: str, seed: int = 0) -> GenConfig:
        return GenConfig(kind=kind, width=self.width, height=self.height,
                         seed=seed, floor_fraction=self.floor_fraction,
                         wall_fraction_range=self.wall_fraction_range,
                         wall_levels=self.wall_levels,
                         min_difficulty=self.min_difficulty,
                         max_attempts=self.max_attempts)

    def total(self) -> int:
        return sum(c for _, c in self.counts)


def record_id(problem: str) -> str:
    return hashlib.sha256(problem.encode()).hexdigest()


def make_record(inst: ProblemInstance) -> InstanceRecord:
    problem = codec.tokens_to_text(codec.encode_problem(inst.grid))
    return InstanceRecord(
        id=record_id(problem),
        kind=inst.kind,
        seed=inst.seed,
        problem=problem,
        trace=codec.tokens_to_text(codec.encode_trace(inst.trace)),
        plan=codec.tokens_to_text(codec.encode_plan(inst.plan)),
        difficulty=inst.difficulty,
        plan_len=len(inst.plan),
        width=inst.grid.width,
        height=inst.grid.height,
    )


def _slot_record(args) -> InstanceRecord:
    cfg_dict, kind, master_seed, index = args
    cfg = DatasetConfig(**cfg_dict)
    seed = derive_seed(master_seed, index)
    try:
        inst = generate_instance(cfg.gen_config(kind, seed))
    except Exception as exc:
        raise GenerationError(index, kind, exc) from exc
    return make_record(inst)


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return workers


def _generate_records(cfg: DatasetConfig, workers: int) -> list[InstanceRecord]:
    cfg_dict = asdict(cfg)
    slots = []
    index = 0
    for kind, count in cfg.counts:
        for _ in range(count):
            slots.append((cfg_dict, kind, cfg.seed, index))
            index += 1
    if workers == 1:
        records = [_slot_record(s) for s in slots]
    else:
        chunk = max(1, math.ceil(len(slots) / (workers * 8)))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_slot_record, slots, chunksize=chunk))

    # Deterministic dedupe pass in slot order. Duplicates are dropped,
    # except for searchformer whose recipe resamples instead.
    seen: set[str] = set()
    out: list[InstanceRecord] = []
    for slot, rec in zip(slots, records):
        _, kind, master_seed, index = slot
        attempt = 0
        while rec.id in seen:
            if kind != SEARCHFORMER:
                rec = None
                break
            attempt += 1
            seed = derive_seed(master_seed, index, attempt)
            rec = make_record(generate_instance(cfg.gen_config(kind, seed)))
        if rec is not None:
            seen.add(rec.id)
            out.append(rec)
    return out


def _kind_runs(records: list[InstanceRecord]) -> list[list]:
    runs: list[list] = []
    for rec in records:
        if runs and runs[-1][0] == rec.kind:
            runs[-1][1] += 1
        else:
            runs.append([rec.kind, 1])
    return runs


def write_shard(path: Path, records: list[InstanceRecord],
                shard_index: int, cfg: DatasetConfig) -> str:
    header = {
        "format": SHARD_FORMAT,
        "shard_index": shard_index,
        "width": cfg.width,
        "height": cfg.height,
        "records": len(records),
        "kinds": _kind_runs(records),
        "seeds": [rec.seed for rec in records],
    }
    lines = [json.dumps(header, sort_keys=True)]
    for rec in records:
        lines.append(f"{rec.problem}\t{rec.trace}\t{rec.plan}")
    data = ("\n".join(lines) + "\n").encode()
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def read_shard(path, expected_sha256: str | None = None) -> list[InstanceRecord]:
    """Read one shard back into records, optionally verifying its digest."""
    path = Path(path)
    data = path.read_bytes()
    if expected_sha256 is not None:
        actual = hashlib.sha256(data).hexdigest()
        if actual != expected_sha256:
            raise DigestMismatch(
                f"{path.name}: digest {actual} != manifest {expected_sha256}")
    text = data.decode()
    if not text.endswith("\n"):
        raise ShardParseError("missing final newline", text.count("\n") + 1)
    lines = text.split("\n")[:-1]
    if not lines:
        raise ShardParseError("empty shard", 1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError:
        raise ShardParseError("bad header", 1) from None
    if header.get("format") != SHARD_FORMAT:
        raise ShardParseError("unknown shard format", 1)
    kinds: list[str] = []
    for kind, count in header["kinds"]:
        kinds.extend([kind] * count)
    seeds = header["seeds"]
    body = lines[1:]
    if not (len(body) == header["records"] == len(kinds) == len(seeds)):
        raise ShardParseError("record count mismatch with header", 1)
    records = []
    for i, line in enumerate(body):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ShardParseError("expected 3 tab-separated fields", i + 2)
        problem, trace, plan = parts
        trace_tokens = len(trace.split())
        plan_tokens = len(plan.split())
        if trace_tokens % 5 or plan_tokens % 3:
            raise ShardParseError("token counts violate the length laws", i + 2)
        records.append(InstanceRecord(
            id=record_id(problem), kind=kinds[i], seed=seeds[i],
            problem=problem, trace=trace, plan=plan,
            difficulty=trace_tokens // 5, plan_len=plan_tokens // 3,
            width=header["width"], height=header["height"]))
    return records


@dataclass
class Dataset:
    """A manifest plus lazily-read shard records."""
    root: Path
    manifest: dict

    @classmethod
    def load(cls, root) -> "Dataset":
        root = Path(root)
        manifest = json.loads((root / MANIFEST_NAME).read_text())
        if manifest.get("format") != MANIFEST_FORMAT:
            raise ValueError(f"{root}: not a mazetrace dataset")
        return cls(root=root, manifest=manifest)

    def records(self, verify: bool = True) -> list[InstanceRecord]:
        out = []
        for shard in self.manifest["shards"]:
            out.extend(read_shard(
                self.root / shard["path"],
                shard["sha256"] if verify else None))
        return out

    def holdout_ids(self) -> set[str]:
        split = self.manifest.get("split")
        if not split:
            return set()
        return {rid for ids in split["holdout"].values() for rid in ids}


def _config_echo(cfg: DatasetConfig) -> dict:
    echo = asdict(cfg)
    echo["counts"] = [list(pair) for pair in cfg.counts]
    echo["wall_fraction_range"] = list(cfg.wall_fraction_range)
    return echo


def build_dataset(cfg: DatasetConfig, out_dir,
                  workers: int | None = None) -> dict:
    """Generate, dedupe, shard, and manifest a dataset under ``out_dir``.

    Returns the manifest dict (also written to manifest.json). Content
    is deterministic for a fixed config; worker count only affects wall
    time. On write failure all partial output files are removed.
    """
    workers = resolve_workers(workers)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = _generate_records(cfg, workers)

    written: list[Path] = []
    try:
        shards = []
        for shard_index in range(0, max(1, math.ceil(len(records) / cfg.shard_size))):
            chunk = records[shard_index * cfg.shard_size:
                            (shard_index + 1) * cfg.shard_size]
            name = f"shard-{shard_index:05d}.tsv"
            path = out / name
            written.append(path)
            digest = write_shard(path, chunk, shard_index, cfg)
            shards.append({"path": name, "records": len(chunk),
                           "sha256": digest})
        dataset_digest = hashlib.sha256(
            "\n".join(s["sha256"] for s in shards).encode()).hexdigest()
        per_kind = {}
        for rec in records:
            per_kind[rec.kind] = per_kind.get(rec.kind, 0) + 1
        manifest = {
            "format": MANIFEST_FORMAT,
            "config": _config_echo(cfg),
            "total_records": len(records),
            "per_kind": per_kind,
            "shards": shards,
            "dataset_digest": dataset_digest,
            "split": None,
        }
        manifest_path = out / MANIFEST_NAME
        written.append(manifest_path)
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return manifest


def split_holdout(root, per_kind_count: int, seed: int) -> dict:
    """Mark a uniform per-kind holdout sample in the manifest.

    Train and holdout stay disjoint by record id; the updated manifest
    is rewritten and returned.
    """
    ds = Dataset.load(root)
    by_kind: dict[str, list[str]] = {}
    for rec in ds.records():
        by_kind.setdefault(rec.kind, []).append(rec.id)
    holdout: dict[str, list[str]] = {}
    rng = np.random.Generator(np.random.PCG64(seed))
    for kind in sorted(by_kind):
        ids = sorted(by_kind[kind])
        if per_kind_count > len(ids):
            raise InsufficientInstances(
                f"{kind}: requested {per_kind_count} holdout of {len(ids)}")
        picked = rng.choice(len(ids), size=per_kind_count, replace=False)
        holdout[kind] = sorted(ids[i] for i in picked)
    ds.manifest["split"] = {
        "seed": seed,
        "per_kind_count": per_kind_count,
        "holdout": holdout,
    }
    (ds.root / MANIFEST_NAME).write_text(
        json.dumps(ds.manifest, indent=2, sort_keys=True) + "\n")
    return ds.manifest
