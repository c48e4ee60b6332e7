"""Acceptance gate: one test per release criterion, each printing a
single PASS line so a run of ``pytest -v tests/test_acceptance.py``
reads as a checklist. The replication test needs released data and
skips itself when the environment does not point at it."""

from __future__ import annotations

import json
import math
import os
import random
import socket
import time
from math import fsum, sqrt
from pathlib import Path

import pytest

from d2tbench.annotation import OVERLAP, PRIMARY, OutputRef, assign_batch, build_campaign
from d2tbench.cli import _load_human_annotations
from d2tbench.collector import SampleSpec, SourceConfig, collect_domain, sample_split
from d2tbench.corpus import BenchmarkSet, Domain, load_results, make_record_id, serialize_content
from d2tbench.errors import ConfigurationError, ExhaustionError
from d2tbench.generator import (
    DETERMINISTIC,
    OUTPUT_PREFIX_TEMPLATE,
    PROMPT_TEMPLATE,
    ChatClient,
    GenerationConfig,
    ModelEndpoint,
    generate_benchmark,
)
from d2tbench.judge import (
    JUDGE_PROMPT_TEMPLATE,
    JUDGE_SYSTEM_MESSAGE,
    JudgeAnnotation,
    align_spans,
    judge_results,
)
from d2tbench.metrics import (
    AnnotationSet,
    annotation_sets_from,
    avg_errors_per_output,
    correlation_levels,
    errors_per_output_table,
    outputs_with_error_table,
    pair_annotations,
    pct_outputs_with_error,
    pct_words_erroneous,
    pct_words_erroneous_both,
    pearson,
    token_count_stats,
    word_error_table,
    words_of,
)
from d2tbench.preprocess import estimate_tokens, load_config_dir, preprocess_benchmark
from d2tbench.spans import CATEGORIES, ErrorCategory

from helpers import FIXTURES, RoutingTransport, completion

GOLDEN = Path(__file__).parent / "golden"
RELEASED = os.environ.get("D2TBENCH_RELEASED_ANNOTATIONS", "")


def accept(label: str) -> None:
    print(f"ACCEPTANCE PASS: {label}")


# --- criterion: span alignment is lossless on locatable mentions ---


def test_criterion_span_alignment():
    words = [
        "alpha", "beta", "gamma", "alpha", "the", "rain", "42", "x-ray",
        "Praha", "peak", "the", "value", "7.5", "beta", "(north)", "end.",
    ]
    rng = random.Random(20240209)
    started = time.perf_counter()
    texts = located = 0
    for _ in range(1000):
        text = " ".join(rng.choice(words) for _ in range(rng.randint(20, 80)))
        annotations = []
        for _ in range(rng.randint(1, 6)):
            a = rng.randrange(len(text))
            b = min(len(text), a + rng.randint(1, 40))
            if a == b:
                continue
            annotations.append(
                JudgeAnnotation(
                    reason="r",
                    text=text[a:b],
                    category=CATEGORIES[rng.randrange(4)],
                )
            )
        spans, failures = align_spans(text, annotations)
        assert len(spans) + len(failures) == len(annotations)
        assert failures == [], f"genuine substring failed to align: {failures}"
        for span, annotation in zip(spans, annotations):
            assert span.slice(text) == annotation.text
        texts += 1
        located += len(spans)
    elapsed = time.perf_counter() - started
    assert texts == 1000 and located > 0
    assert elapsed < 5.0, f"alignment took {elapsed:.2f}s over 1000 texts"
    accept(f"span alignment located {located} substrings in {elapsed:.2f}s with zero misses")


# --- criterion: correlation agrees with a direct oracle ---


def oracle_pearson(xs, ys):
    n = len(xs)
    mx, my = fsum(xs) / n, fsum(ys) / n
    cov = fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = fsum((x - mx) ** 2 for x in xs)
    vy = fsum((y - my) ** 2 for y in ys)
    return cov / sqrt(vx * vy)


def test_criterion_pearson_oracle():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(500):
        n = rng.randint(3, 300)
        xs = [rng.uniform(-50, 50) for _ in range(n)]
        ys = [0.4 * x + rng.uniform(-30, 30) for x in xs]
        r = pearson(xs, ys)
        worst = max(worst, abs(r - oracle_pearson(xs, ys)))
        assert abs(r - pearson(ys, xs)) < 1e-15
        shifted = pearson([2.5 * x + 3 for x in xs], [0.5 * y - 7 for y in ys])
        assert abs(r - shifted) < 1e-9
        flipped = pearson([-x for x in xs], ys)
        assert abs(r + flipped) < 1e-9
        assert -1.0 <= r <= 1.0
    assert worst <= 1e-12, f"pearson drifted {worst} from the direct formula"
    accept(f"pearson matches the direct formula on 500 draws (max drift {worst:.2e})")


# --- criterion: word aggregates equal a brute-force character oracle ---


def oracle_word_pct(sets, category=None):
    flagged = 0
    total = 0
    for aset in sets:
        chars = set()
        for span in aset.spans:
            if category is None or span.category is category:
                chars.update(range(span.start, span.end))
        for start, end in words_of(aset.output_text):
            total += 1
            flagged += bool(chars.intersection(range(start, end)))
    return flagged / total * 100.0


def test_criterion_aggregation_equivalence():
    from d2tbench.spans import ErrorSpan

    rng = random.Random(99)
    sets = []
    for i in range(200):
        text = " ".join(
            rng.choice(["fact", "x", "rainfall", "99", "steady", "drop"])
            for _ in range(rng.randint(5, 40))
        )
        spans = []
        for _ in range(rng.randint(0, 5)):
            a = rng.randrange(len(text))
            b = min(len(text), a + rng.randint(1, 25))
            if a < b:
                spans.append(ErrorSpan(a, b, CATEGORIES[rng.randrange(4)]))
        sets.append(
            AnnotationSet(
                example_id=make_record_id(list(Domain)[i % 5], "dev", i),
                model_id="m",
                domain=list(Domain)[i % 5],
                source="synthetic",
                output_text=text,
                spans=spans,
            )
        )

    assert pct_words_erroneous(sets) == oracle_word_pct(sets)
    for category in CATEGORIES:
        assert pct_words_erroneous(sets, category) == oracle_word_pct(sets, category)
        assert pct_words_erroneous(sets, category) <= pct_words_erroneous(sets)

    total_spans = sum(len(aset.spans) for aset in sets)
    assert avg_errors_per_output(sets) == total_spans / len(sets)
    per_category = fsum(avg_errors_per_output(sets, c) for c in CATEGORIES)
    assert math.isclose(per_category, avg_errors_per_output(sets), rel_tol=1e-12)

    with_error = sum(1 for aset in sets if aset.spans)
    assert pct_outputs_with_error(sets) == with_error / len(sets) * 100.0
    assert pct_outputs_with_error(sets) <= 100.0 * avg_errors_per_output(sets)
    accept("word, output, and average aggregates equal the brute-force oracle on 200 sets")


# --- criterion: prompts are byte-identical to the published wording ---


def test_criterion_prompt_bytes():
    assert PROMPT_TEMPLATE == (GOLDEN / "generation_prompt.txt").read_text(encoding="utf-8")
    assert OUTPUT_PREFIX_TEMPLATE == (GOLDEN / "output_prefix.txt").read_text(encoding="utf-8")
    assert JUDGE_SYSTEM_MESSAGE == (GOLDEN / "judge_system.txt").read_text(encoding="utf-8")
    assert JUDGE_PROMPT_TEMPLATE == (GOLDEN / "judge_prompt.txt").read_text(encoding="utf-8")
    for category, name in zip(
        CATEGORIES, ("Incorrect", "Not checkable", "Misleading", "Other")
    ):
        assert category.display_name == name
        assert f"{category.code}: " in JUDGE_PROMPT_TEMPLATE
    accept("generation and judge prompts are byte-identical to the published wording")


# --- criterion: the full pipeline runs offline on replay fixtures ---


GENERATED_RAW = 'The data shows a steady pattern with a clear peak near the end."'
JUDGE_REPLY = json.dumps(
    {
        "errors": [
            {"reason": "not supported by the data", "text": "steady pattern", "type": 0},
            {"reason": "never mentioned", "text": "missing mention", "type": 1},
        ]
    }
)


def test_criterion_pipeline_offline(monkeypatch, tmp_path):
    def deny(*args, **kwargs):
        raise AssertionError("network access attempted during the offline pipeline")

    monkeypatch.setattr(socket, "socket", deny)
    monkeypatch.setattr(socket, "create_connection", deny)
    started = time.perf_counter()

    records = []
    for domain in Domain:
        items = collect_domain(domain, SourceConfig(fixture_dir=FIXTURES / domain.value))
        records.extend(sample_split(items, domain, SampleSpec(dev=3, test=3, seed=2)))
    bset = BenchmarkSet(records=records)
    per_domain = {d: len([r for r in records if r.domain is d]) for d in Domain}
    assert all(count >= 5 for count in per_domain.values())

    config_dir = Path(__file__).parent.parent / "config" / "preprocess"
    prepared = preprocess_benchmark(bset, load_config_dir(config_dir))
    for record in prepared.records:
        assert estimate_tokens(serialize_content(record.format, record.content)) <= 8000

    results = []
    for model in ("model-a", "model-b"):
        endpoint = ModelEndpoint(base_url="http://llm.test/v1", model_id=model)
        client = ChatClient(
            endpoint, transport=RoutingTransport(lambda payload: completion(GENERATED_RAW))
        )
        results.extend(
            generate_benchmark(prepared.records, client, GenerationConfig(mode=DETERMINISTIC))
        )
    assert len(results) == 2 * len(prepared.records)
    assert all("failed" not in result.flags for result in results)
    assert all(result.text == GENERATED_RAW[:-1] for result in results)

    judge_endpoint = ModelEndpoint(base_url="http://judge.test/v1", model_id="judge")
    judge_client = ChatClient(
        judge_endpoint, transport=RoutingTransport(lambda payload: completion(JUDGE_REPLY))
    )
    reports = judge_results(prepared, results, judge_client)
    assert all(not report.judge_failed for report in reports)
    assert all(len(report.spans) == 1 and len(report.failures) == 1 for report in reports)

    sets = annotation_sets_from(results, [r.to_annotation() for r in reports], "judge")
    report_text = "\n\n".join(
        [
            errors_per_output_table(sets),
            outputs_with_error_table(sets),
            word_error_table(sets),
        ]
    )
    assert "model-a" in report_text and "model-b" in report_text
    # "steady pattern" covers 2 of the 13 words of every output
    assert abs(pct_words_erroneous(sets) - 200.0 / 13.0) < 1e-9
    assert pct_outputs_with_error(sets) == 100.0
    stats = token_count_stats(results)
    assert stats["count"] == len(results)

    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"pipeline took {elapsed:.1f}s"
    accept(
        f"offline pipeline covered {len(prepared.records)} records x 2 models "
        f"in {elapsed:.1f}s with no network"
    )


# --- criterion: published-figure replication on released data ---


EXPECTED_CORRELATION = {"word": 0.26, "example": 0.52, "domain": 0.93}
EXPECTED_AGREEMENT = {"word": 0.36, "example": 0.53, "domain": 0.85}
EXPECTED_WORD_PCT = {
    # category -> (human, judge, both)
    None: (21.9, 20.7, 6.3),
    ErrorCategory.INCORRECT: (10.1, 14.2, 4.1),
    ErrorCategory.NOT_CHECKABLE: (7.8, 4.3, 2.0),
    ErrorCategory.MISLEADING: (2.2, 1.5, 0.1),
    ErrorCategory.OTHER: (1.8, 0.7, 0.1),
}
TABLE_TOLERANCE = 0.02
CORRELATION_TOLERANCE = 0.03


def _model_like(sets, *needles):
    models = sorted({aset.model_id for aset in sets})
    for model in models:
        if any(needle in model.lower() for needle in needles):
            return model
    raise AssertionError(f"no model matching {needles!r} among {models}")


@pytest.mark.skipif(
    not RELEASED,
    reason="set D2TBENCH_RELEASED_ANNOTATIONS to a directory holding "
    "results/<model>/<domain>/<split>.jsonl, human.jsonl, and judge.jsonl",
)
def test_criterion_released_replication():
    root = Path(RELEASED)
    results = []
    for path in sorted((root / "results").rglob("*.jsonl")):
        results.extend(load_results(path))
    human = _load_human_annotations(str(root / "human.jsonl"))
    judge = _load_human_annotations(str(root / "judge.jsonl"))
    human_sets = annotation_sets_from(results, human, "human")
    judge_sets = annotation_sets_from(results, judge, "judge")
    assert human_sets and judge_sets

    mean_estimated = fsum(estimate_tokens(r.text) for r in results) / len(results)
    mean_reported = fsum(r.token_count for r in results) / len(results)
    if abs(mean_estimated - mean_reported) > 0.05 * max(mean_reported, 1.0):
        print(
            "NOTE: token estimator and endpoint tokenizer disagree: "
            f"estimated {mean_estimated:.1f} vs reported {mean_reported:.1f} per output"
        )

    zephyr = _model_like(human_sets, "zephyr")
    zephyr_avg = avg_errors_per_output([s for s in human_sets if s.model_id == zephyr])
    assert abs(zephyr_avg - 2.58) <= TABLE_TOLERANCE

    llama = _model_like(human_sets, "llama-2", "llama2", "llama_2")
    llama_pct = pct_outputs_with_error([s for s in human_sets if s.model_id == llama])
    assert abs(llama_pct - 85.6) <= TABLE_TOLERANCE

    pairs = pair_annotations(human_sets, judge_sets)
    assert pairs
    for category, (expected_human, expected_judge, expected_both) in EXPECTED_WORD_PCT.items():
        got_human = pct_words_erroneous([a for a, _ in pairs], category)
        got_judge = pct_words_erroneous([b for _, b in pairs], category)
        got_both = pct_words_erroneous_both(pairs, category)
        assert abs(got_human - expected_human) <= TABLE_TOLERANCE, (category, got_human)
        assert abs(got_judge - expected_judge) <= TABLE_TOLERANCE, (category, got_judge)
        assert abs(got_both - expected_both) <= TABLE_TOLERANCE, (category, got_both)

    levels = correlation_levels(pair_annotations(judge_sets, human_sets))
    assert abs(levels.word - EXPECTED_CORRELATION["word"]) <= CORRELATION_TOLERANCE
    assert abs(levels.example - EXPECTED_CORRELATION["example"]) <= CORRELATION_TOLERANCE
    assert abs(levels.domain - EXPECTED_CORRELATION["domain"]) <= CORRELATION_TOLERANCE

    doubled: dict[tuple[str, str], list] = {}
    for annotation in human:
        doubled.setdefault((annotation.example_id, annotation.model_id), []).append(annotation)
    overlap_pairs = {key: anns for key, anns in doubled.items() if len(anns) >= 2}
    if overlap_pairs:
        first = annotation_sets_from(results, [anns[0] for anns in overlap_pairs.values()], "a")
        second = annotation_sets_from(results, [anns[1] for anns in overlap_pairs.values()], "b")
        agreement = correlation_levels(pair_annotations(first, second))
        assert abs(agreement.word - EXPECTED_AGREEMENT["word"]) <= CORRELATION_TOLERANCE
        assert abs(agreement.example - EXPECTED_AGREEMENT["example"]) <= CORRELATION_TOLERANCE
        assert abs(agreement.domain - EXPECTED_AGREEMENT["domain"]) <= CORRELATION_TOLERANCE
    else:
        print("NOTE: no doubly-annotated outputs in the release; agreement not checked")

    misses = sum(len(annotation.failures) for annotation in judge)
    mentions = misses + sum(len(annotation.spans) for annotation in judge)
    if misses:
        assert abs(misses / mentions - 137 / 6927) <= 0.005
    else:
        print("NOTE: judge annotations carry no failure records; miss rate not checked")
    accept("released-data replication matched the published tables and correlations")


# --- criterion: campaign arithmetic for the full study ---


def test_criterion_campaign_arithmetic():
    models = ("model-a", "model-b", "model-c", "model-d")
    outputs = [
        OutputRef(make_record_id(domain, split, i), model)
        for domain in Domain
        for split, base in (("dev", 0), ("test", 0))
        for i in range(50)
        for model in models
    ]
    assert len(outputs) == 2000  # 500 examples x 4 models
    campaign = build_campaign("study", outputs, batch_size=20, seed=0, overlap=100)

    primary = [batch for batch in campaign.batches if batch.kind == PRIMARY]
    overlap = [batch for batch in campaign.batches if batch.kind == OVERLAP]
    assert len(primary) == 100
    assert all(len(batch.items) == 20 for batch in primary)
    covered = [item for batch in primary for item in batch.items]
    assert len(covered) == 2000 and set(covered) == set(outputs)

    assert len(overlap) == 5
    doubled = [item for batch in overlap for item in batch.items]
    assert len(doubled) == 100 and len(set(doubled)) == 100
    assert set(doubled) <= set(outputs)

    with pytest.raises(ConfigurationError):
        build_campaign(
            "broken",
            [ref for ref in outputs if not (ref.model_id == "model-d" and ref.example_id.startswith("owid"))],
        )

    # 20 annotators clear the primary pool, a fresh one clears the overlap pool
    annotators = [f"ann-{i:02d}" for i in range(25)]
    taken = []
    for annotator in annotators:
        for _ in range(5):
            try:
                batch = assign_batch(campaign, annotator)
            except ExhaustionError:
                break
            batch.completed = True
            taken.append(batch.id)
    assert len(taken) == len(set(taken)) == 105
    accept("2000 outputs form 100 balanced batches plus 5 overlap batches, fully assignable")
