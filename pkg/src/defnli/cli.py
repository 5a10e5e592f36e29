"""Command-line entry points: index, find-critical, build, stats.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
Diagnostics go to stderr; data goes to files or stdout only.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from collections import Counter
from pathlib import Path

from . import augment, corpus, critical, pipeline, wiktionary
from .oracle import OracleError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def _log(message: str) -> None:
    print(message, file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="defnli", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="index Wiktionary dumps for offset lookup")
    p_index.add_argument("--simple-dump", help="Simple English Wiktionary pages-articles XML")
    p_index.add_argument("--english-dump", help="English Wiktionary pages-articles XML")
    p_index.add_argument("--refresh", action="store_true", help="rebuild even if an index exists")

    p_find = sub.add_parser("find-critical", help="scan a corpus for critical words")
    p_find.add_argument("--config", help="JSON run configuration")
    p_find.add_argument("--corpus", help="corpus JSONL (overrides config train_corpus)")
    p_find.add_argument("--out", required=True, help="output reports JSONL path")
    p_find.add_argument("--threshold", type=float)
    p_find.add_argument("--top-k", type=int, dest="top_k")
    p_find.add_argument("--parallelism", type=int)
    p_find.add_argument("--transport", choices=("mock", "stdio", "http"))
    p_find.add_argument(
        "--oracle-command",
        dest="oracle_command",
        help="bridge command line for stdio transport (shell-style quoting)",
    )
    p_find.add_argument("--oracle-endpoint", dest="oracle_endpoint")
    p_find.add_argument("--oracle-script", dest="oracle_script")
    p_find.add_argument("--seed", type=int)
    p_find.add_argument("--output-dir", dest="output_dir")

    p_build = sub.add_parser("build", help="build the augmented dataset matrix")
    p_build.add_argument("--config", help="JSON run configuration")
    p_build.add_argument("--seed", type=int)
    p_build.add_argument("--output-dir", dest="output_dir")
    p_build.add_argument("--scramble", choices=augment.SCRAMBLE_MODES)
    p_build.add_argument("--definitions", choices=augment.DEFS_MODES)
    p_build.add_argument("--threshold", type=float)
    p_build.add_argument("--parallelism", type=int)

    p_stats = sub.add_parser("stats", help="summarize a built dataset directory")
    p_stats.add_argument("--dataset-dir", required=True)
    return parser


def _oracle_overrides(args) -> dict:
    oracle = {}
    if getattr(args, "transport", None):
        oracle["transport"] = args.transport
    if getattr(args, "oracle_command", None):
        oracle["transport"] = oracle.get("transport", "stdio")
        oracle["command"] = shlex.split(args.oracle_command)
    if getattr(args, "oracle_endpoint", None):
        oracle["transport"] = oracle.get("transport", "http")
        oracle["endpoint"] = args.oracle_endpoint
    if getattr(args, "oracle_script", None):
        oracle["transport"] = oracle.get("transport", "mock")
        oracle["script"] = args.oracle_script
    return oracle


def cmd_index(args) -> int:
    if not args.simple_dump and not args.english_dump:
        _log("error: at least one of --simple-dump/--english-dump is required")
        return EXIT_USAGE
    for dump_path, dictionary in (
        (args.simple_dump, wiktionary.SIMPLE_ENGLISH),
        (args.english_dump, wiktionary.ENGLISH),
    ):
        if dump_path is None:
            continue
        if not Path(dump_path).exists():
            _log(f"error: dump not found: {dump_path}")
            return EXIT_USAGE
        try:
            index = wiktionary.build_index(dump_path, dictionary, refresh=args.refresh)
        except wiktionary.WiktionaryError as exc:
            _log(f"error: {exc}")
            return EXIT_RUNTIME
        state = "reused existing index" if index.reused else "indexed"
        _log(f"{dictionary}: {state}, {len(index.entries)} articles ({dump_path})")
    return EXIT_OK


def cmd_find_critical(args) -> int:
    overrides = {
        "threshold": args.threshold,
        "top_k": args.top_k,
        "parallelism": args.parallelism,
        "seed": args.seed,
        "output_dir": args.output_dir,
    }
    if args.corpus:
        overrides["train_corpus"] = args.corpus
    oracle_overrides = _oracle_overrides(args)
    if oracle_overrides:
        overrides["oracle"] = oracle_overrides
    config = pipeline.load_run_config(args.config, overrides, require_build_fields=False)
    if config.train_corpus is None:
        _log("error: no corpus given (use --corpus or train_corpus in the config)")
        return EXIT_USAGE

    oracle = pipeline.make_oracle(config.oracle)
    try:
        pipeline.check_oracle(oracle)
    except OracleError as exc:
        _log(f"error: {exc}")
        return EXIT_RUNTIME
    oracles = critical.Oracles.single(oracle)

    stats = corpus.ReadStats()
    examples = list(corpus.read_corpus(config.train_corpus, stats))
    summary = pipeline.ScanSummary()
    reports = pipeline.scan_corpus(
        examples, oracles, config.threshold, config.top_k, config.parallelism, summary
    )
    pipeline.write_reports(reports, args.out)
    if hasattr(oracle, "close"):
        oracle.close()
    _log(
        f"scanned {summary.scanned} examples ({stats.skipped} ingest skips): "
        f"{summary.critical_examples} with critical words, {summary.reports} reports, "
        f"{summary.oracle_failures} oracle failures"
    )
    return EXIT_OK


def cmd_build(args) -> int:
    overrides = {
        "seed": args.seed,
        "output_dir": args.output_dir,
        "scramble": args.scramble,
        "definitions": args.definitions,
        "threshold": args.threshold,
        "parallelism": args.parallelism,
    }
    config = pipeline.load_run_config(args.config, overrides)
    try:
        pipeline.run_build(config, log=_log)
    except OracleError as exc:
        _log(f"error: {exc}")
        return EXIT_RUNTIME
    except (corpus.CorpusError, wiktionary.WiktionaryError) as exc:
        _log(f"error: {exc}")
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_stats(args) -> int:
    dataset_dir = Path(args.dataset_dir)
    manifest_path = dataset_dir / pipeline.MANIFEST_NAME
    if not manifest_path.exists():
        _log(f"error: no {pipeline.MANIFEST_NAME} in {dataset_dir}")
        return EXIT_RUNTIME
    with open(manifest_path, "r", encoding="utf-8") as fp:
        manifest = json.load(fp)

    print(f"dataset directory: {dataset_dir}")
    print(f"seed: {manifest.get('seed')}")
    for name in sorted(manifest.get("files", {})):
        path = dataset_dir / name
        if not path.exists():
            _log(f"warning: {name} listed in manifest but missing on disk")
            continue
        labels = Counter()
        verified = 0
        total = 0
        with_defs = 0
        for example in corpus.read_dataset(path):
            total += 1
            labels[example.label] += 1
            verified += int(example.verified)
            with_defs += int(example.definition_text is not None)
        label_text = ", ".join(f"{label}={labels[label]}" for label in corpus.LABELS)
        verified_fraction = verified / total if total else 0.0
        print(f"{name}: {total} examples | {label_text} | "
              f"verified {verified_fraction:.2f} | with-definition {with_defs}")
        entry = manifest["files"].get(name, {})
        sources = entry.get("definition_sources")
        if sources:
            source_text = ", ".join(f"{k}={v}" for k, v in sorted(sources.items()))
            print(f"    definition sources: {source_text}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "index":
            return cmd_index(args)
        if args.command == "find-critical":
            return cmd_find_critical(args)
        if args.command == "build":
            return cmd_build(args)
        if args.command == "stats":
            return cmd_stats(args)
    except pipeline.ConfigError as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    except corpus.CorpusError as exc:
        _log(f"error: {exc}")
        return EXIT_RUNTIME
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
