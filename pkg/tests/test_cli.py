"""The command-line pipeline, run end to end on the committed fixtures
with scripted model endpoints."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from d2tbench import cli
from d2tbench.corpus import Domain, load_benchmark, load_results, results_path
from d2tbench.spans import SpanAnnotation, load_annotations, save_annotations

from helpers import FIXTURES, RoutingTransport, completion

CONFIG = Path(__file__).resolve().parent.parent / "config" / "preprocess"

GENERATED = 'The forecast is mild with light rain and a test sentence."'


def run(argv) -> int:
    return cli.main(argv)


REAL_CLIENT = cli.ChatClient


def patched_client(monkeypatch, reply: str):
    """Swap the CLI's client for one with a canned-transport route."""

    def factory(endpoint, *args, **kwargs):
        return REAL_CLIENT(
            endpoint, transport=RoutingTransport(lambda payload: completion(reply))
        )

    monkeypatch.setattr(cli, "ChatClient", factory)


def test_pipeline_collect_to_report(tmp_path, monkeypatch, capsys):
    bench = tmp_path / "bench"
    prepared = tmp_path / "prepared"
    results = tmp_path / "results"
    judged = tmp_path / "judge.jsonl"

    assert run(
        [
            "collect",
            "--out", str(bench),
            "--fixtures", str(FIXTURES),
            "--dev", "2",
            "--test", "1",
            "--seed", "1",
        ]
    ) == 0
    assert load_benchmark(bench).manifest_counts()["openweather"] == {"dev": 2, "test": 1}

    assert run(
        [
            "preprocess",
            "--benchmark", str(bench),
            "--config", str(CONFIG),
            "--out", str(prepared),
        ]
    ) == 0
    prepared_set = load_benchmark(prepared)
    assert len(prepared_set) == len(Domain) * 3
    weather = prepared_set.subset(domain=Domain.OPENWEATHER)[0]
    assert "coord" not in weather.content["city"]

    patched_client(monkeypatch, GENERATED)
    assert run(
        [
            "generate",
            "--benchmark", str(prepared),
            "--out", str(results),
            "--base-url", "http://llm.test/v1",
            "--model", "test-model",
            "--split", "dev",
        ]
    ) == 0
    path = results_path(results, "test-model", Domain.OWID, "dev")
    saved = load_results(path)
    assert len(saved) == 2
    assert saved[0].text == GENERATED[:-1]
    assert not results_path(results, "test-model", Domain.OWID, "test").exists()

    judge_reply = json.dumps(
        {"errors": [{"reason": "not in the data", "text": "a test sentence", "type": 1}]}
    )
    patched_client(monkeypatch, judge_reply)
    assert run(
        [
            "judge",
            "--benchmark", str(prepared),
            "--results", str(results),
            "--out", str(judged),
            "--base-url", "http://judge.test/v1",
            "--model", "judge-model",
        ]
    ) == 0
    annotations = load_annotations(judged)
    assert len(annotations) == len(Domain) * 2
    assert all(len(a.spans) == 1 for a in annotations)

    capsys.readouterr()
    assert run(["report", "--results", str(results), "--judge", str(judged)]) == 0
    out = capsys.readouterr().out
    assert "test-model" in out
    assert "Errors per output" in out
    assert "Not checkable" in out
    assert "Words marked erroneous" in out


def test_generate_domain_filter_writes_only_that_domain(tmp_path, monkeypatch):
    bench = tmp_path / "bench"
    run(
        [
            "collect",
            "--out", str(bench),
            "--fixtures", str(FIXTURES),
            "--dev", "1",
            "--test", "1",
        ]
    )
    patched_client(monkeypatch, 'Words."')
    out = tmp_path / "results"
    assert run(
        [
            "generate",
            "--benchmark", str(bench),
            "--out", str(out),
            "--base-url", "http://llm.test/v1",
            "--model", "m",
            "--domain", "wikidata",
        ]
    ) == 0
    written = sorted(p.relative_to(out).as_posix() for p in out.rglob("*.jsonl"))
    assert written == ["m/wikidata/dev.jsonl", "m/wikidata/test.jsonl"]


def test_collect_shortfall_is_reported_as_an_error(tmp_path, capsys):
    code = run(
        [
            "collect",
            "--out", str(tmp_path / "bench"),
            "--fixtures", str(FIXTURES),
            "--dev", "100",
            "--test", "100",
        ]
    )
    assert code == 1
    assert "need 200" in capsys.readouterr().err


def test_judge_with_empty_results_dir_fails(tmp_path, capsys):
    bench = tmp_path / "bench"
    run(
        [
            "collect",
            "--out", str(bench),
            "--fixtures", str(FIXTURES),
            "--dev", "1",
            "--test", "0",
        ]
    )
    (tmp_path / "results").mkdir()
    code = run(
        [
            "judge",
            "--benchmark", str(bench),
            "--results", str(tmp_path / "results"),
            "--out", str(tmp_path / "judge.jsonl"),
            "--base-url", "http://judge.test/v1",
            "--model", "judge-model",
        ]
    )
    assert code == 1
    assert "no results" in capsys.readouterr().err


def test_load_human_annotations_accepts_both_formats(tmp_path):
    annotations = [
        SpanAnnotation(example_id="owid-dev-0000", model_id="m", annotator_id="a")
    ]
    plain = tmp_path / "plain.jsonl"
    save_annotations(plain, annotations)
    assert cli._load_human_annotations(str(plain)) == annotations

    export = tmp_path / "export.jsonl"
    header = {
        "kind": "span_annotations",
        "campaign": "c",
        "batch_size": 5,
        "seed": 0,
        "batches": ["c-b0000"],
    }
    line = annotations[0].to_dict()
    line["batch_id"] = "c-b0000"
    export.write_text(json.dumps(header) + "\n" + json.dumps(line) + "\n", encoding="utf-8")
    assert cli._load_human_annotations(str(export)) == annotations


def test_unknown_subcommand_exits_with_usage():
    with pytest.raises(SystemExit):
        run(["frobnicate"])
