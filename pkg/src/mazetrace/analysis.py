"""Judge model responses against ground truth and quantify the
trace-length/difficulty relationship per generator kind.

A response is judged by splitting it at the first ``plan`` token
(:func:`mazetrace.codec.parse_response`), validating the plan against
the instance's grid, and pairing the generated intermediate token count
(y) with the ground-truth trace token length (x = 5 * difficulty).
Responses at or past the context limit count as failures. Pearson and
Spearman coefficients are our quantification of how loose the (x, y)
relationship is; they are flagged undefined when either margin is
constant.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mazetrace import codec
from mazetrace.dataset import InstanceRecord
from mazetrace.search import INVALID, VALID, VALID_OPTIMAL, validate_plan, validate_trace


class IdMismatch(ValueError):
    """Response paired with the wrong record, or with no record at all."""


class ResponseParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


@dataclass(frozen=True)
class ModelResponse:
    problem_id: str
    tokens: tuple[str, ...]
    truncated: bool

    @property
    def token_count(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ScatterPoint:
    id: str
    kind: str
    x: int            # ground-truth trace token length
    y: int            # generated intermediate token length
    verdict: str      # valid_optimal | valid | invalid
    reason: str | None
    truncated: bool


@dataclass(frozen=True)
class CorrelationStats:
    n: int
    pearson_r: float | None
    spearman_rho: float | None
    mean_abs_err: float
    frac_within_10pct: float
    degenerate: bool  # True when a coefficient is undefined (constant margin)


@dataclass(frozen=True)
class KindStats:
    count: int
    valid_rate: float
    optimal_rate: float
    truncation_rate: float
    correlation: CorrelationStats | None


@dataclass(frozen=True)
class AnalysisReport:
    per_kind: dict[str, KindStats]
    overall: KindStats
    points: list[ScatterPoint]
    missing_response_ids: list[str]


def load_responses(path, limit: int) -> list[ModelResponse]:
    """Read a responses file: one ``id<TAB>token string`` line per response."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            rid, sep, text = line.partition("\t")
            if not sep:
                raise ResponseParseError("expected 'id<TAB>tokens'", i)
            tokens = tuple(text.split())
            out.append(ModelResponse(problem_id=rid, tokens=tokens,
                                     truncated=len(tokens) >= limit))
    return out


def judge_response(record: InstanceRecord, response: ModelResponse,
                   limit: int, count_total_tokens: bool = False,
                   strict_trace: bool = False) -> ScatterPoint:
    """Score one response against its ground-truth record.

    Truncated responses (token count >= limit) are invalid regardless of
    content. With ``strict_trace`` the trace region must also decode and
    replay legally against the grid.
    """
    if record.id != response.problem_id:
        raise IdMismatch(f"record {record.id} judged against response "
                         f"{response.problem_id}")
    truncated = response.truncated or response.token_count >= limit
    parsed = codec.parse_response(response.tokens)
    y = parsed.total_token_count if count_total_tokens \
        else parsed.intermediate_token_count
    x = len(record.trace.split())

    if truncated:
        verdict, reason = INVALID, "truncated at context limit"
    elif parsed.plan is None:
        verdict, reason = INVALID, parsed.error
    else:
        grid = codec.decode_problem(record.problem, record.width, record.height)
        if strict_trace:
            try:
                events = codec.decode_trace(
                    response.tokens[:parsed.intermediate_token_count])
            except codec.CodecError as exc:
                return ScatterPoint(record.id, record.kind, x, y,
                                    INVALID, f"trace region: {exc}", truncated)
            ok, why = validate_trace(grid, events)
            if not ok:
                return ScatterPoint(record.id, record.kind, x, y,
                                    INVALID, f"trace region: {why}", truncated)
        verdict, reason = validate_plan(grid, parsed.plan)
    return ScatterPoint(record.id, record.kind, x, y, verdict, reason, truncated)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing the average of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    xd = x - x.mean()
    yd = y - y.mean()
    denom = np.sqrt((xd * xd).sum() * (yd * yd).sum())
    if denom == 0.0:
        return None
    return float((xd * yd).sum() / denom)


def correlate(xs, ys) -> CorrelationStats:
    """Pearson r and Spearman rho (average-rank ties) for paired samples.

    Coefficients are None with ``degenerate=True`` when a margin is
    constant or there are fewer than two points.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("correlate expects two equal-length 1-d samples")
    n = len(x)
    if n == 0:
        raise ValueError("correlate expects at least one point")
    mean_abs = float(np.abs(y - x).mean())
    within = float((np.abs(y - x) <= 0.1 * np.abs(x)).mean())
    if n < 2:
        return CorrelationStats(n, None, None, mean_abs, within, True)
    r = _pearson(x, y)
    rho = None
    if r is not None:
        rho = _pearson(_average_ranks(x), _average_ranks(y))
    degenerate = r is None or rho is None
    return CorrelationStats(n, r, rho, mean_abs, within, degenerate)


def _kind_stats(points: list[ScatterPoint]) -> KindStats:
    n = len(points)
    valid = sum(p.verdict in (VALID, VALID_OPTIMAL) for p in points)
    optimal = sum(p.verdict == VALID_OPTIMAL for p in points)
    truncated = sum(p.truncated for p in points)
    corr = correlate([p.x for p in points], [p.y for p in points]) if n else None
    return KindStats(count=n, valid_rate=valid / n, optimal_rate=optimal / n,
                     truncation_rate=truncated / n, correlation=corr)


def build_report(records: list[InstanceRecord],
                 responses: list[ModelResponse], limit: int,
                 count_total_tokens: bool = False,
                 strict_trace: bool = False) -> AnalysisReport:
    """Judge all responses and aggregate per generator kind.

    Records without a response are listed, not fatal; a response whose
    id matches no record raises :class:`IdMismatch`.
    """
    by_id = {rec.id: rec for rec in records}
    points = []
    for resp in responses:
        rec = by_id.get(resp.problem_id)
        if rec is None:
            raise IdMismatch(f"response id {resp.problem_id} has no record")
        points.append(judge_response(rec, resp, limit,
                                     count_total_tokens=count_total_tokens,
                                     strict_trace=strict_trace))
    points.sort(key=lambda p: (p.kind, p.x, p.id))
    responded = {p.id for p in points}
    missing = sorted(rid for rid in by_id if rid not in responded)
    per_kind: dict[str, list[ScatterPoint]] = {}
    for p in points:
        per_kind.setdefault(p.kind, []).append(p)
    if not points:
        raise ValueError("no responses to report on")
    return AnalysisReport(
        per_kind={k: _kind_stats(v) for k, v in sorted(per_kind.items())},
        overall=_kind_stats(points),
        points=points,
        missing_response_ids=missing)


def _stats_dict(stats: KindStats) -> dict:
    corr = None
    if stats.correlation is not None:
        c = stats.correlation
        corr = {"n": c.n, "pearson_r": c.pearson_r,
                "spearman_rho": c.spearman_rho,
                "mean_abs_err": c.mean_abs_err,
                "frac_within_10pct": c.frac_within_10pct,
                "degenerate": c.degenerate}
    return {"count": stats.count, "valid_rate": stats.valid_rate,
            "optimal_rate": stats.optimal_rate,
            "truncation_rate": stats.truncation_rate,
            "correlation": corr}


def report_to_json(report: AnalysisReport) -> str:
    doc = {
        "per_kind": {k: _stats_dict(v) for k, v in report.per_kind.items()},
        "overall": _stats_dict(report.overall),
        "missing_response_ids": report.missing_response_ids,
        "points": [{"id": p.id, "kind": p.kind, "x": p.x, "y": p.y,
                    "verdict": p.verdict, "truncated": p.truncated}
                   for p in report.points],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit_scatter_csv(report: AnalysisReport, path) -> None:
    """Write the scatter table: kind,x,y,verdict,truncated (stable order)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "x", "y", "verdict", "truncated"])
        for p in report.points:
            writer.writerow([p.kind, p.x, p.y, p.verdict, int(p.truncated)])


def read_scatter_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [dict(row) for row in csv.DictReader(fh)]
