"""Fixed token vocabulary and serialization between domain objects and tokens.

Canonical text form is whitespace-separated tokens, one record per line:

    problem   start x y goal x y wall x y wall x y ...
    trace     close x y cG cH create x y cG cH ...
    plan      plan x y plan x y ...

Wall tokens are emitted in ascending-x order (and ascending y within a
column). Encoders/decoders for our own records are strict round-trips;
:func:`parse_response` is the lenient path for arbitrary model output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from mazetrace.search import (
    CLOSE,
    CREATE,
    Coord,
    Grid,
    Plan,
    Trace,
    TraceEvent,
)

STRUCTURAL_TOKENS = ("start", "goal", "wall", "create", "close", "plan",
                     "bos", "eos", "pad")

PLAN_TOKEN = "plan"


class CodecError(ValueError):
    """Malformed token stream in a strict decode."""

    def __init__(self, message: str, pos: int | None = None):
        super().__init__(message if pos is None else f"{message} (token {pos})")
        self.pos = pos


class VocabularyError(ValueError):
    """Token outside the vocabulary."""


@dataclass(frozen=True)
class Vocabulary:
    """Deterministic token inventory for a grid size and cost ceiling.

    Layout: structural words, then coordinate tokens "0".."max(W,H)-1",
    then cost tokens "c0".."c<max_cost>", then any reserved padding
    tokens. Token ids are positions in this list.
    """

    width: int
    height: int
    max_cost: int
    tokens: tuple[str, ...]
    _ids: dict[str, int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise VocabularyError(f"token {token!r} not in vocabulary") from None

    def token_of(self, token_id: int) -> str:
        if not 0 <= token_id < len(self.tokens):
            raise VocabularyError(f"token id {token_id} out of range")
        return self.tokens[token_id]

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.id_of(t) for t in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.token_of(i) for i in ids]

    def export_table(self, path) -> None:
        """Write the two-column (token, id) table."""
        with open(path, "w", encoding="utf-8") as fh:
            for i, tok in enumerate(self.tokens):
                fh.write(f"{tok}\t{i}\n")


def build_vocab(width: int, height: int, max_cost: int | None = None,
                extra_specials: int = 0) -> Vocabulary:
    """Build the vocabulary for ``width`` x ``height`` grids.

    ``max_cost`` defaults to width*height, an upper bound on any g or h
    emitted on such grids. ``extra_specials`` appends reserved tokens so
    a target vocabulary size can be hit exactly.
    """
    if max_cost is None:
        max_cost = width * height
    if max_cost < 0 or extra_specials < 0:
        raise ValueError("max_cost and extra_specials must be non-negative")
    tokens = list(STRUCTURAL_TOKENS)
    tokens += [str(i) for i in range(max(width, height))]
    tokens += [f"c{i}" for i in range(max_cost + 1)]
    tokens += [f"reserved{i}" for i in range(extra_specials)]
    return Vocabulary(width=width, height=height, max_cost=max_cost,
                      tokens=tuple(tokens),
                      _ids={t: i for i, t in enumerate(tokens)})


def load_vocab_table(path) -> list[tuple[str, int]]:
    """Read back a (token, id) table written by ``export_table``."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tok, _, idx = line.rstrip("\n").partition("\t")
            rows.append((tok, int(idx)))
    return rows


def encode_problem(grid: Grid) -> list[str]:
    """``start x y goal x y`` then one ``wall x y`` triple per wall cell."""
    tokens = ["start", str(grid.start[0]), str(grid.start[1]),
              "goal", str(grid.goal[0]), str(grid.goal[1])]
    # transpose so nonzero() yields ascending x, then ascending y within x
    xs, ys = np.nonzero(grid.cells.T)
    for x, y in zip(xs.tolist(), ys.tolist()):
        tokens.append("wall")
        tokens.append(str(x))
        tokens.append(str(y))
    return tokens


def encode_trace(trace: Trace, vocab: Vocabulary | None = None) -> list[str]:
    """Five tokens per event: word, x, y, cG, cH."""
    tokens = []
    for ev in trace:
        if vocab is not None and (ev.g > vocab.max_cost or ev.h > vocab.max_cost):
            raise VocabularyError(
                f"cost {max(ev.g, ev.h)} exceeds vocabulary max_cost {vocab.max_cost}")
        tokens.append(ev.kind)
        tokens.append(str(ev.pos[0]))
        tokens.append(str(ev.pos[1]))
        tokens.append(f"c{ev.g}")
        tokens.append(f"c{ev.h}")
    return tokens


def encode_plan(plan: Plan) -> list[str]:
    """Three tokens per plan cell: plan, x, y."""
    tokens = []
    for x, y in plan:
        tokens.append(PLAN_TOKEN)
        tokens.append(str(x))
        tokens.append(str(y))
    return tokens


def _as_tokens(tokens: Sequence[str] | str) -> list[str]:
    return tokens.split() if isinstance(tokens, str) else list(tokens)


def _int_token(tokens: list[str], pos: int, what: str) -> int:
    try:
        return int(tokens[pos])
    except (IndexError, ValueError):
        raise CodecError(f"expected {what}", pos) from None


def _cost_token(tokens: list[str], pos: int) -> int:
    try:
        tok = tokens[pos]
        if not tok.startswith("c"):
            raise ValueError
        return int(tok[1:])
    except (IndexError, ValueError):
        raise CodecError("expected cost token", pos) from None


def decode_problem(tokens: Sequence[str] | str, width: int, height: int) -> Grid:
    """Strict inverse of :func:`encode_problem` for known grid dimensions."""
    tokens = _as_tokens(tokens)
    if len(tokens) < 6 or tokens[0] != "start" or tokens[3] != "goal":
        raise CodecError("problem must begin 'start x y goal x y'", 0)
    start = (_int_token(tokens, 1, "start x"), _int_token(tokens, 2, "start y"))
    goal = (_int_token(tokens, 4, "goal x"), _int_token(tokens, 5, "goal y"))
    cells = np.zeros((height, width), dtype=np.uint8)
    pos = 6
    while pos < len(tokens):
        if tokens[pos] != "wall":
            raise CodecError("expected 'wall'", pos)
        x = _int_token(tokens, pos + 1, "wall x")
        y = _int_token(tokens, pos + 2, "wall y")
        if not (0 <= x < width and 0 <= y < height):
            raise CodecError(f"wall ({x}, {y}) out of bounds", pos)
        cells[y, x] = 1
        pos += 3
    return Grid(width, height, cells, start, goal)


def decode_trace(tokens: Sequence[str] | str) -> Trace:
    """Strict inverse of :func:`encode_trace`."""
    tokens = _as_tokens(tokens)
    if len(tokens) % 5:
        raise CodecError("trace length not a multiple of 5", len(tokens))
    events = []
    for pos in range(0, len(tokens), 5):
        kind = tokens[pos]
        if kind not in (CLOSE, CREATE):
            raise CodecError("expected 'close' or 'create'", pos)
        events.append(TraceEvent(
            kind,
            (_int_token(tokens, pos + 1, "x"), _int_token(tokens, pos + 2, "y")),
            _cost_token(tokens, pos + 3),
            _cost_token(tokens, pos + 4)))
    return events


def decode_plan(tokens: Sequence[str] | str) -> Plan:
    """Strict inverse of :func:`encode_plan`."""
    tokens = _as_tokens(tokens)
    if len(tokens) % 3:
        raise CodecError("plan length not a multiple of 3", len(tokens))
    cells = []
    for pos in range(0, len(tokens), 3):
        if tokens[pos] != PLAN_TOKEN:
            raise CodecError("expected 'plan'", pos)
        cells.append((_int_token(tokens, pos + 1, "x"),
                      _int_token(tokens, pos + 2, "y")))
    return cells


@dataclass(frozen=True)
class ParsedResponse:
    """Lenient split of a model emission into trace region and plan.

    ``intermediate_token_count`` counts tokens strictly before the first
    ``plan`` token (the whole sequence when there is none). ``plan`` is
    None when the plan region is missing or malformed, with the reason
    and token position recorded.
    """

    intermediate_token_count: int
    total_token_count: int
    plan: Plan | None
    error: str | None = None
    error_pos: int | None = None

    @property
    def trace_prefix_len(self) -> int:
        return self.intermediate_token_count


def parse_response(tokens: Sequence[str] | str) -> ParsedResponse:
    """Split arbitrary model output at the first ``plan`` token.

    Tokens in the trace region are counted but not validated. From the
    first ``plan`` token, (plan, x, y) triples are read greedily; any
    trailing tokens after the last complete triple are ignored. A
    truncated or non-numeric triple yields an error verdict.
    """
    tokens = _as_tokens(tokens)
    total = len(tokens)
    try:
        first_plan = tokens.index(PLAN_TOKEN)
    except ValueError:
        return ParsedResponse(total, total, None, "no plan token", None)
    cells: Plan = []
    pos = first_plan
    while pos < total and tokens[pos] == PLAN_TOKEN:
        if pos + 2 >= total:
            return ParsedResponse(first_plan, total, None,
                                  "incomplete plan triple at tail", pos)
        try:
            cell = (int(tokens[pos + 1]), int(tokens[pos + 2]))
        except ValueError:
            return ParsedResponse(first_plan, total, None,
                                  "non-numeric plan coordinate", pos)
        cells.append(cell)
        pos += 3
    return ParsedResponse(first_plan, total, cells)


def tokens_to_text(tokens: Iterable[str]) -> str:
    return " ".join(tokens)
