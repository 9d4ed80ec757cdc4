import numpy as np
import pytest
import scipy.stats

from mazetrace import analysis, codec
from mazetrace.analysis import (
    IdMismatch,
    ModelResponse,
    ResponseParseError,
    build_report,
    correlate,
    emit_scatter_csv,
    judge_response,
    load_responses,
    read_scatter_csv,
    report_to_json,
)
from mazetrace.dataset import make_record
from mazetrace.generators import GenConfig, generate_instance
from mazetrace.search import INVALID, VALID, VALID_OPTIMAL


def _records(kinds=("wilson", "freespace"), n=10, size=10):
    records = []
    for kind in kinds:
        for seed in range(n):
            cfg = GenConfig(kind=kind, width=size, height=size,
                            seed=seed * 31 + 1, wall_levels=2)
            records.append(make_record(generate_instance(cfg)))
    # drop id collisions (tiny grids can repeat)
    unique = {}
    for rec in records:
        unique.setdefault(rec.id, rec)
    return list(unique.values())


def echo_response(rec) -> ModelResponse:
    tokens = tuple(f"{rec.trace} {rec.plan}".split())
    return ModelResponse(problem_id=rec.id, tokens=tokens, truncated=False)


class TestCorrelate:
    def test_perfect_line(self):
        x = np.arange(10, 200, 7)
        stats = correlate(x, x)
        assert stats.pearson_r == pytest.approx(1.0, abs=1e-12)
        assert stats.spearman_rho == pytest.approx(1.0, abs=1e-12)
        assert stats.mean_abs_err == 0.0
        assert stats.frac_within_10pct == 1.0
        assert not stats.degenerate

    def test_anticorrelation(self):
        x = np.arange(50, dtype=float)
        stats = correlate(x, -x + 7)
        assert stats.pearson_r == pytest.approx(-1.0, abs=1e-12)
        assert stats.spearman_rho == pytest.approx(-1.0, abs=1e-12)

    def test_independent_noise_is_near_zero(self):
        rng = np.random.default_rng(1234)
        x = rng.integers(5, 4000, size=10_000)
        y = rng.integers(5, 4000, size=10_000)
        stats = correlate(x, y)
        assert abs(stats.pearson_r) < 0.05
        assert abs(stats.spearman_rho) < 0.05

    def test_matches_scipy_with_ties(self):
        rng = np.random.default_rng(9)
        x = rng.integers(0, 12, size=400).astype(float)  # heavy ties
        y = (x * 3 + rng.integers(0, 8, size=400)).astype(float)
        stats = correlate(x, y)
        assert stats.pearson_r == pytest.approx(scipy.stats.pearsonr(x, y)[0], abs=1e-12)
        assert stats.spearman_rho == pytest.approx(scipy.stats.spearmanr(x, y)[0], abs=1e-12)

    def test_degenerate_margins_are_flagged(self):
        stats = correlate([1, 2, 3], [5, 5, 5])
        assert stats.degenerate and stats.pearson_r is None
        stats = correlate([4], [9])
        assert stats.degenerate and stats.n == 1

    def test_affine_invariance(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=500)
        y = rng.normal(size=500) + 0.5 * x
        base = correlate(x, y)
        scaled = correlate(x, 3.5 * y + 11.0)
        assert scaled.pearson_r == pytest.approx(base.pearson_r, abs=1e-12)
        assert scaled.spearman_rho == pytest.approx(base.spearman_rho, abs=1e-12)
        # rho also survives strictly monotone nonlinear transforms
        mono = correlate(x, np.exp(y))
        assert mono.spearman_rho == pytest.approx(base.spearman_rho, abs=1e-12)


class TestJudge:
    def test_echo_scores_valid_optimal_on_the_line(self):
        rec = _records(("wilson",), n=1)[0]
        point = judge_response(rec, echo_response(rec), limit=32_000)
        assert point.verdict == VALID_OPTIMAL
        assert point.x == point.y == 5 * rec.difficulty

    def test_truncated_is_invalid_even_with_plan(self):
        rec = _records(("wilson",), n=1)[0]
        resp = echo_response(rec)
        point = judge_response(rec, resp, limit=len(resp.tokens))
        assert point.verdict == INVALID and point.truncated
        assert "truncated" in point.reason

    def test_limit_tokens_no_plan(self):
        rec = _records(("wilson",), n=1)[0]
        limit = 40
        resp = ModelResponse(rec.id, tuple(["close"] * limit), truncated=True)
        point = judge_response(rec, resp, limit=limit)
        assert point.truncated and point.verdict == INVALID
        assert point.y == limit

    def test_suboptimal_detour_is_valid_not_optimal(self):
        cfg = GenConfig(kind="freespace", width=10, height=10, seed=4,
                        wall_levels=2)
        inst = generate_instance(cfg)
        rec = make_record(inst)
        plan = list(inst.plan)
        x0, y0 = plan[0]
        # insert an immediate back-and-forth detour through a free neighbor
        from mazetrace.search import neighbors_in_order
        nb = next(n for n in neighbors_in_order(inst.grid, (x0, y0))
                  if n != plan[1])
        detour = [plan[0], nb] + plan
        tokens = tuple(codec.encode_trace(inst.trace) + codec.encode_plan(detour))
        point = judge_response(rec, ModelResponse(rec.id, tokens, False), 32_000)
        assert point.verdict == VALID

    def test_junk_prefix_raises_y_and_never_upgrades(self):
        rec = _records(("freespace",), n=1)[0]
        base = echo_response(rec)
        point = judge_response(rec, base, limit=32_000)
        for k in (1, 13):
            noisy = ModelResponse(rec.id, tuple(["wall"] * k) + base.tokens, False)
            shifted = judge_response(rec, noisy, limit=32_000)
            assert shifted.y == point.y + k
            assert shifted.verdict == point.verdict

    def test_id_mismatch(self):
        a, b = _records(("wilson",), n=2)[:2]
        with pytest.raises(IdMismatch):
            judge_response(a, echo_response(b), limit=32_000)

    def test_strict_trace_flags_illegal_trace_region(self):
        rec = _records(("freespace",), n=1)[0]
        resp = echo_response(rec)
        assert judge_response(rec, resp, 32_000, strict_trace=True).verdict \
            == VALID_OPTIMAL
        # replace the trace region with syntactically valid but illegal events
        bad_tokens = tuple(("close 0 0 c0 c9 " * 3 + rec.plan).split())
        point = judge_response(rec, ModelResponse(rec.id, bad_tokens, False),
                               32_000, strict_trace=True)
        assert point.verdict == INVALID and "trace region" in point.reason

    def test_count_total_tokens_flag(self):
        rec = _records(("wilson",), n=1)[0]
        resp = echo_response(rec)
        point = judge_response(rec, resp, 32_000, count_total_tokens=True)
        assert point.y == len(resp.tokens) == 5 * rec.difficulty + 3 * rec.plan_len


class TestReport:
    def test_echo_reports_perfect(self):
        records = _records()
        responses = [echo_response(r) for r in records]
        report = build_report(records, responses, limit=32_000)
        assert report.overall.valid_rate == 1.0
        assert report.overall.optimal_rate == 1.0
        for kind, stats in report.per_kind.items():
            assert stats.valid_rate == 1.0
            if not stats.correlation.degenerate:
                assert stats.correlation.pearson_r == pytest.approx(1.0, abs=1e-12)

    def test_partition_law(self):
        records = _records()
        responses = [echo_response(r) for r in records]
        report = build_report(records, responses, limit=32_000)
        assert sum(s.count for s in report.per_kind.values()) == \
            report.overall.count == len(responses)

    def test_five_of_hundred(self):
        records = _records(("freespace",), n=300, size=12)[:100]
        assert len(records) == 100
        responses = []
        for i, rec in enumerate(records):
            if i < 5:
                responses.append(echo_response(rec))
            else:
                responses.append(ModelResponse(rec.id, ("close", "1", "1"), False))
        report = build_report(records, responses, limit=32_000)
        assert report.overall.valid_rate == pytest.approx(0.05)

    def test_permutation_invariance(self):
        records = _records()
        responses = [echo_response(r) for r in records]
        a = build_report(records, responses, limit=32_000)
        b = build_report(records[::-1], responses[::-1], limit=32_000)
        assert a == b

    def test_missing_and_unknown_ids(self):
        records = _records(("wilson",), n=4)
        responses = [echo_response(r) for r in records[:-1]]
        report = build_report(records, responses, limit=32_000)
        assert report.missing_response_ids == [records[-1].id]
        stranger = ModelResponse("f" * 64, ("plan", "1", "1"), False)
        with pytest.raises(IdMismatch):
            build_report(records, responses + [stranger], limit=32_000)

    def test_truncation_monotone_in_limit(self):
        records = _records(("wilson",), n=8)
        responses = [echo_response(r) for r in records]
        high = build_report(records, responses, limit=10_000)
        low = build_report(records, responses, limit=50)
        assert low.overall.truncation_rate >= high.overall.truncation_rate


class TestCsvAndJson:
    def test_csv_round_trip_and_stability(self, tmp_path):
        records = _records()
        responses = [echo_response(r) for r in records]
        report = build_report(records, responses, limit=32_000)
        path = tmp_path / "scatter.csv"
        emit_scatter_csv(report, path)
        first = path.read_bytes()
        emit_scatter_csv(report, path)
        assert path.read_bytes() == first
        rows = read_scatter_csv(path)
        assert len(rows) == len(report.points)
        xs = [int(r["x"]) for r in rows]
        ys = [int(r["y"]) for r in rows]
        stats = correlate(xs, ys)
        assert stats.pearson_r == pytest.approx(
            report.overall.correlation.pearson_r, abs=1e-12)

    def test_json_shape(self):
        records = _records(("wilson",), n=3)
        responses = [echo_response(r) for r in records]
        report = build_report(records, responses, limit=32_000)
        import json
        doc = json.loads(report_to_json(report))
        assert set(doc) == {"per_kind", "overall", "missing_response_ids", "points"}
        assert doc["overall"]["count"] == len(records)


def test_load_responses(tmp_path):
    path = tmp_path / "r.txt"
    path.write_text("aaa\tclose 1 1 c0 c1 plan 1 1\nbbb\t\n")
    responses = load_responses(path, limit=5)
    assert responses[0].problem_id == "aaa"
    assert responses[0].token_count == 8 and responses[0].truncated
    assert responses[1].token_count == 0 and not responses[1].truncated
    path.write_text("no-tab-line\n")
    with pytest.raises(ResponseParseError):
        load_responses(path, limit=5)
