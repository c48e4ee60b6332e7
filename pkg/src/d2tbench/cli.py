"""Command-line pipeline: collect, preprocess, generate, judge, serve,
report. Each subcommand reads and writes plain files, so stages can run
on different machines or be rerun in isolation."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .annotation import OutputRef, build_campaign, load_export
from .collector import SampleSpec, SourceConfig, collect_domain, sample_split
from .corpus import (
    SPLITS,
    BenchmarkSet,
    Domain,
    load_benchmark,
    load_results,
    results_path,
    save_benchmark,
    save_results,
)
from .errors import BenchmarkError, ConfigurationError
from .generator import (
    CONCAT,
    DETERMINISTIC,
    PREFILL,
    SAMPLING,
    ChatClient,
    GenerationConfig,
    ModelEndpoint,
    generate_benchmark,
)
from .judge import JudgeConfig, judge_results, save_judge_reports
from .metrics import (
    annotation_sets_from,
    correlation_levels,
    errors_per_output_table,
    outputs_with_error_table,
    pair_annotations,
    token_count_stats,
    word_error_table,
)
from .preprocess import load_config_dir, preprocess_benchmark
from .spans import load_annotations

log = logging.getLogger(__name__)


def _load_human_annotations(path: str) -> list:
    """Accept a service export or a plain annotations JSONL file."""
    try:
        export = load_export(Path(path).read_text(encoding="utf-8"))
    except (ConfigurationError, KeyError, ValueError):
        return load_annotations(path)
    return [annotation for _, annotation in export.annotations]


def _domains(names: list[str] | None) -> list[Domain]:
    if not names:
        return list(Domain)
    return [Domain.from_id(name) for name in names]


def _endpoint(args) -> ModelEndpoint:
    api_key = os.environ.get(args.api_key_env) if args.api_key_env else None
    return ModelEndpoint(
        base_url=args.base_url,
        model_id=args.model,
        api_key=api_key,
        timeout=args.timeout,
        supports_seed=not args.no_seed_support,
        prefix_mode=CONCAT if args.concat_prefix else PREFILL,
    )


def cmd_collect(args) -> int:
    records = []
    for domain in _domains(args.domain):
        config = SourceConfig(fixture_dir=Path(args.fixtures) / domain.value)
        items = collect_domain(domain, config)
        spec = SampleSpec(
            dev=args.dev, test=args.test, seed=args.seed, allow_shortfall=args.allow_shortfall
        )
        records.extend(sample_split(items, domain, spec))
        log.info("%s: %d items collected", domain.value, len(items))
    bset = BenchmarkSet(records=records, provenance={"seed": args.seed})
    save_benchmark(bset, args.out)
    print(f"wrote {len(bset)} records to {args.out}")
    return 0


def cmd_preprocess(args) -> int:
    bset = load_benchmark(args.benchmark)
    configs = load_config_dir(args.config) if args.config else None
    prepared = preprocess_benchmark(bset, configs)
    save_benchmark(prepared, args.out)
    print(f"wrote {len(prepared)} prepared records to {args.out}")
    return 0


def cmd_generate(args) -> int:
    bset = load_benchmark(args.benchmark)
    client = ChatClient(_endpoint(args))
    config = GenerationConfig(
        mode=SAMPLING if args.sampling else DETERMINISTIC,
        max_new_tokens=args.max_new_tokens,
        seed=args.seed,
    )
    total = 0
    for domain in _domains(args.domain):
        for split in args.split or SPLITS:
            records = bset.subset(domain=domain, split=split)
            if not records:
                continue
            results = generate_benchmark(records, client, config, max_workers=args.max_workers)
            path = results_path(args.out, args.model, domain, split)
            save_results(path, results)
            failed = sum("failed" in result.flags for result in results)
            total += len(results)
            print(f"{path}: {len(results)} results ({failed} failed)")
    if not total:
        print("nothing matched the requested domains and splits", file=sys.stderr)
        return 1
    return 0


def cmd_judge(args) -> int:
    bset = load_benchmark(args.benchmark)
    results = []
    for path in sorted(Path(args.results).rglob("*.jsonl")):
        results.extend(load_results(path))
    if not results:
        print(f"no results under {args.results}", file=sys.stderr)
        return 1
    client = ChatClient(_endpoint(args))
    config = JudgeConfig(whitespace_retry=args.whitespace_retry)
    reports = judge_results(bset, results, client, config, max_workers=args.max_workers)
    written = save_judge_reports(args.out, reports)
    failed = len(reports) - written
    print(f"{args.out}: {written} annotations written, {failed} judgings failed")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .annotation.service import create_app

    bset = load_benchmark(args.benchmark)
    results = []
    for path in sorted(Path(args.results).rglob("*.jsonl")):
        results.extend(load_results(path))
    usable = [result for result in results if "failed" not in result.flags]
    outputs = [OutputRef(result.example_id, result.model_id) for result in usable]
    campaign = build_campaign(
        args.campaign_id,
        outputs,
        batch_size=args.batch_size,
        seed=args.seed,
        overlap=args.overlap,
    )
    print(
        f"campaign {campaign.id}: {len(outputs)} outputs in "
        f"{len(campaign.batches)} batches"
    )
    app = create_app(campaign, bset, usable, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_report(args) -> int:
    results = []
    for path in sorted(Path(args.results).rglob("*.jsonl")):
        results.extend(load_results(path))
    blocks = []

    for model in sorted({result.model_id for result in results}):
        stats = token_count_stats([r for r in results if r.model_id == model])
        blocks.append(
            f"{model}: {stats['count']} outputs, mean {stats['mean']:.1f} tokens "
            f"(min {stats['min']}, max {stats['max']})"
        )

    judge_sets = human_sets = None
    if args.judge:
        judge_sets = annotation_sets_from(results, load_annotations(args.judge), "judge")
        blocks.append(errors_per_output_table(judge_sets))
        blocks.append(outputs_with_error_table(judge_sets))
    if args.human:
        human_sets = annotation_sets_from(results, _load_human_annotations(args.human), "human")
        blocks.append(errors_per_output_table(human_sets, title="Errors per output (human)"))
    if judge_sets and human_sets:
        pairs = pair_annotations(judge_sets, human_sets)
        blocks.append(word_error_table(judge_sets, human_sets))
        levels = correlation_levels(pairs)
        blocks.append(
            "Judge vs human Pearson r: "
            f"word {levels.word:.2f}, example {levels.example:.2f}, domain {levels.domain:.2f}"
        )
    elif judge_sets:
        blocks.append(word_error_table(judge_sets))

    print("\n\n".join(blocks))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2tbench",
        description="Reference-free benchmarking of data-to-text generation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    collect = commands.add_parser(
        "collect",
        help="sample a benchmark from replay fixtures",
        description="Build dev/test splits from committed fixtures. Live "
        "collection needs per-source query arguments, so it stays a library "
        "call; the CLI always replays.",
    )
    collect.add_argument("--out", required=True, help="benchmark output directory")
    collect.add_argument("--fixtures", default="fixtures", help="fixture tree root")
    collect.add_argument(
        "--domain", action="append", choices=[d.value for d in Domain], help="repeatable; default all"
    )
    collect.add_argument("--dev", type=int, default=100)
    collect.add_argument("--test", type=int, default=100)
    collect.add_argument("--seed", type=int, default=0)
    collect.add_argument("--allow-shortfall", action="store_true")
    collect.set_defaults(func=cmd_collect)

    preprocess = commands.add_parser("preprocess", help="filter, annotate units, enforce budget")
    preprocess.add_argument("--benchmark", required=True)
    preprocess.add_argument("--out", required=True)
    preprocess.add_argument("--config", help="directory of per-domain INI files")
    preprocess.set_defaults(func=cmd_preprocess)

    def endpoint_options(sub):
        sub.add_argument("--base-url", required=True, help="chat-completions API root")
        sub.add_argument("--model", required=True, help="model identifier on the endpoint")
        sub.add_argument("--api-key-env", help="environment variable holding the API key")
        sub.add_argument("--timeout", type=float, default=120.0)
        sub.add_argument("--max-workers", type=int, default=4)
        sub.add_argument(
            "--no-seed-support",
            action="store_true",
            help="endpoint ignores seed; record it as unsupported",
        )
        sub.add_argument(
            "--concat-prefix",
            action="store_true",
            help="endpoint rejects assistant prefills; fold the prefix into the user turn",
        )

    generate = commands.add_parser("generate", help="prompt a model over the benchmark")
    generate.add_argument("--benchmark", required=True)
    generate.add_argument("--out", required=True, help="results root directory")
    generate.add_argument(
        "--domain", action="append", choices=[d.value for d in Domain], help="repeatable; default all"
    )
    generate.add_argument("--split", action="append", choices=list(SPLITS))
    generate.add_argument("--sampling", action="store_true", help="sample instead of greedy decoding")
    generate.add_argument("--seed", type=int)
    generate.add_argument("--max-new-tokens", type=int, default=512)
    endpoint_options(generate)
    generate.set_defaults(func=cmd_generate)

    judge = commands.add_parser("judge", help="mark error spans with an LLM judge")
    judge.add_argument("--benchmark", required=True)
    judge.add_argument("--results", required=True, help="results root directory")
    judge.add_argument("--out", required=True, help="annotations JSONL file")
    judge.add_argument(
        "--whitespace-retry",
        action="store_true",
        help="also try whitespace-insensitive alignment",
    )
    endpoint_options(judge)
    judge.set_defaults(func=cmd_judge)

    serve = commands.add_parser("serve", help="run the human annotation service")
    serve.add_argument("--benchmark", required=True)
    serve.add_argument("--results", required=True)
    serve.add_argument("--campaign-id", default="campaign")
    serve.add_argument("--batch-size", type=int, default=20)
    serve.add_argument("--overlap", type=int, default=0)
    serve.add_argument("--seed", type=int, default=0)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--ui", help="directory with the built browser UI to serve at /")
    serve.set_defaults(func=cmd_serve)

    report = commands.add_parser("report", help="aggregate metrics into text tables")
    report.add_argument("--results", required=True)
    report.add_argument("--judge", help="judge annotations JSONL")
    report.add_argument("--human", help="human annotations JSONL or service export")
    report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except BenchmarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
