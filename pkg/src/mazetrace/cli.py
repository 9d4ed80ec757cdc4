"""Command-line entry point.

Subcommands are thin adapters over the library: generate (instances to
TSV lines), solve (one instance's trace and plan), dataset (sharded
batch + manifest), split (holdout marking), judge (per-response
verdicts), report (aggregate stats + scatter CSV), vocab (token table).

Exit codes: 0 success, 1 domain errors, 2 usage errors. Human-readable
summaries go to stderr; machine-readable artifacts to files or stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from mazetrace import analysis, codec, dataset, generators, search

DOMAIN_ERRORS = (
    search.Unsolvable,
    generators.TooFewFreeCells,
    generators.RejectionBudgetExceeded,
    dataset.DigestMismatch,
    dataset.ShardParseError,
    dataset.InsufficientInstances,
    dataset.GenerationError,
    analysis.IdMismatch,
    analysis.ResponseParseError,
    codec.CodecError,
    codec.VocabularyError,
    ValueError,
    OSError,
)


def _parse_coord(text: str) -> search.Coord:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise ValueError(f"expected 'x,y', got {text!r}") from None


def _add_gen_flags(p: argparse.ArgumentParser, kinds_csv: bool = False):
    if kinds_csv:
        p.add_argument("--kind", required=True,
                       help="generator kind(s), comma-separated: "
                            + "|".join(generators.ALL_KINDS))
    else:
        p.add_argument("--kind", required=True, choices=generators.ALL_KINDS)
    p.add_argument("--size", type=int, default=30,
                   help="grid side length (default 30)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--floor-fraction", type=float, default=0.45,
                   help="drunkard stopping fraction")
    p.add_argument("--wall-levels", type=int, default=4,
                   help="freespace outer wall rings")
    p.add_argument("--min-difficulty", type=int, default=10,
                   help="searchformer rejection threshold")


def _gen_config(args, kind: str, seed: int) -> generators.GenConfig:
    return generators.GenConfig(
        kind=kind, width=args.size, height=args.size, seed=seed,
        floor_fraction=args.floor_fraction, wall_levels=args.wall_levels,
        min_difficulty=args.min_difficulty)


def _parse_kinds(text: str) -> list[str]:
    kinds = [k.strip() for k in text.split(",") if k.strip()]
    for k in kinds:
        if k not in generators.ALL_KINDS:
            raise ValueError(f"unknown generator kind {k!r}")
    if not kinds:
        raise ValueError("no generator kind given")
    return kinds


def cmd_generate(args) -> int:
    lines = []
    for i in range(args.count):
        seed = args.seed if args.count == 1 else generators.derive_seed(args.seed, i)
        inst = generators.generate_instance(_gen_config(args, args.kind, seed))
        rec = dataset.make_record(inst)
        lines.append(f"{rec.problem}\t{rec.trace}\t{rec.plan}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.count} instance(s) to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args) -> int:
    kind = args.kind
    if args.start is not None or args.goal is not None:
        if args.start is None or args.goal is None:
            raise ValueError("--start and --goal must be given together")
        if kind == generators.SEARCHFORMER:
            raise ValueError("searchformer embeds its own endpoint loop")
        cfg = _gen_config(args, kind, args.seed)
        cells = generators.generate_cells(cfg)
        grid = search.Grid(cfg.width, cfg.height, cells, args.start, args.goal)
    else:
        inst = generators.generate_instance(_gen_config(args, kind, args.seed))
        grid = inst.grid
    try:
        result = search.astar_trace(grid)
    except search.Unsolvable as exc:
        sys.stdout.write(codec.tokens_to_text(codec.encode_trace(exc.trace)) + "\n")
        print("unsolvable: open list exhausted before the goal", file=sys.stderr)
        return 1
    sys.stdout.write(codec.tokens_to_text(codec.encode_trace(result.trace)) + "\n")
    sys.stdout.write(codec.tokens_to_text(codec.encode_plan(result.plan)) + "\n")
    return 0


def cmd_dataset(args) -> int:
    kinds = _parse_kinds(args.kind)
    base, extra = divmod(args.count, len(kinds))
    counts = tuple((k, base + (1 if i < extra else 0))
                   for i, k in enumerate(kinds))
    cfg = dataset.DatasetConfig(
        counts=counts, width=args.size, height=args.size, seed=args.seed,
        shard_size=args.shard_size, floor_fraction=args.floor_fraction,
        wall_levels=args.wall_levels, min_difficulty=args.min_difficulty)
    manifest = dataset.build_dataset(cfg, args.out, workers=args.workers)
    print(f"wrote {manifest['total_records']} records in "
          f"{len(manifest['shards'])} shard(s) to {args.out} "
          f"(digest {manifest['dataset_digest'][:12]})", file=sys.stderr)
    return 0


def cmd_split(args) -> int:
    manifest = dataset.split_holdout(args.dataset, args.holdout_per_kind, args.seed)
    holdout = manifest["split"]["holdout"]
    total = sum(len(v) for v in holdout.values())
    print(f"held out {total} records "
          f"({args.holdout_per_kind} per kind x {len(holdout)} kinds)",
          file=sys.stderr)
    return 0


def _judge_inputs(args):
    ds = dataset.Dataset.load(args.dataset)
    records = ds.records()
    responses = analysis.load_responses(args.responses, args.limit)
    return records, responses


def cmd_judge(args) -> int:
    records, responses = _judge_inputs(args)
    by_id = {rec.id: rec for rec in records}
    for resp in responses:
        rec = by_id.get(resp.problem_id)
        if rec is None:
            raise analysis.IdMismatch(f"response id {resp.problem_id} has no record")
        p = analysis.judge_response(rec, resp, args.limit,
                                    count_total_tokens=args.total_tokens,
                                    strict_trace=args.strict_trace)
        reason = p.reason or ""
        sys.stdout.write(f"{p.id}\t{p.kind}\t{p.x}\t{p.y}\t{p.verdict}\t"
                         f"{int(p.truncated)}\t{reason}\n")
    return 0


def cmd_report(args) -> int:
    records, responses = _judge_inputs(args)
    report = analysis.build_report(records, responses, args.limit,
                                   count_total_tokens=args.total_tokens,
                                   strict_trace=args.strict_trace)
    text = analysis.report_to_json(report)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote report to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    if args.csv:
        analysis.emit_scatter_csv(report, args.csv)
        print(f"wrote scatter CSV to {args.csv}", file=sys.stderr)
    overall = report.overall
    print(f"judged {overall.count} responses: valid {overall.valid_rate:.3f}, "
          f"optimal {overall.optimal_rate:.3f}, "
          f"truncated {overall.truncation_rate:.3f}", file=sys.stderr)
    return 0


def cmd_vocab(args) -> int:
    vocab = codec.build_vocab(args.size, args.size, max_cost=args.max_cost,
                              extra_specials=args.extra_specials)
    if args.out:
        vocab.export_table(args.out)
        print(f"wrote {vocab.size} tokens to {args.out}", file=sys.stderr)
    else:
        for i, tok in enumerate(vocab.tokens):
            sys.stdout.write(f"{tok}\t{i}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mazetrace",
        description="Maze generation, tracing A*, datasets, and response analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit problem/trace/plan TSV lines")
    _add_gen_flags(p)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="print one instance's trace and plan")
    _add_gen_flags(p)
    p.add_argument("--start", type=_parse_coord, help="x,y (with --goal)")
    p.add_argument("--goal", type=_parse_coord, help="x,y (with --start)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("dataset", help="build a sharded dataset + manifest")
    _add_gen_flags(p, kinds_csv=True)
    p.add_argument("--count", type=int, required=True, help="total records")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--shard-size", type=int, default=50_000)
    p.add_argument("--workers", type=int, default=None,
                   help=f"parallel workers (default: ${dataset.WORKERS_ENV} "
                        "or CPU count)")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("split", help="mark a per-kind holdout in the manifest")
    p.add_argument("--dataset", required=True)
    p.add_argument("--holdout-per-kind", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    for name, fn in (("judge", cmd_judge), ("report", cmd_report)):
        p = sub.add_parser(name, help="score model responses against a dataset")
        p.add_argument("--dataset", required=True)
        p.add_argument("--responses", required=True)
        p.add_argument("--limit", type=int, default=32_000,
                       help="context limit; responses at or past it fail")
        p.add_argument("--strict-trace", action="store_true",
                       help="also require a legal trace region")
        p.add_argument("--total-tokens", action="store_true",
                       help="use total tokens (not pre-plan tokens) as y")
        if name == "report":
            p.add_argument("--csv", help="scatter CSV output path")
            p.add_argument("--out", help="report JSON path (default stdout)")
        p.set_defaults(func=fn)

    p = sub.add_parser("vocab", help="print or write the token table")
    p.add_argument("--size", type=int, default=30)
    p.add_argument("--max-cost", type=int, default=None)
    p.add_argument("--extra-specials", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_vocab)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
