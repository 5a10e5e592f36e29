"""End-to-end orchestration: scan corpora for critical words, build all
requested dataset cells and evaluation subsets, and record a manifest."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from . import augment, corpus, critical, wiktionary
from .oracle import (
    DEFAULT_TOP_K,
    HttpOracleClient,
    OracleError,
    ScriptedOracle,
    StdioOracleClient,
)

MANIFEST_NAME = "manifest.json"
ORACLE_ENDPOINT_ENV = "DEFNLI_ORACLE_ENDPOINT"

SUFFIX_FULL = "full"
SUFFIX_VERIFIED = "verified"
SUFFIX_NEW = "new"
SUFFIX_MULTI = "multi"


class ConfigError(Exception):
    """Invalid or incomplete run configuration."""


@dataclass
class OracleConfig:
    transport: str = "mock"
    command: Optional[List[str]] = None  # stdio
    endpoint: Optional[str] = None  # http
    script: Optional[str] = None  # mock

    def validate(self) -> None:
        if self.transport == "stdio":
            if not self.command:
                raise ConfigError("stdio oracle requires a command")
        elif self.transport == "http":
            if not self.endpoint:
                raise ConfigError("http oracle requires an endpoint")
        elif self.transport == "mock":
            pass
        else:
            raise ConfigError(f"unknown oracle transport {self.transport!r}")


@dataclass
class RunConfig:
    seed: int
    output_dir: str
    train_corpus: Optional[str] = None
    test_corpus: Optional[str] = None
    simple_dump: Optional[str] = None
    english_dump: Optional[str] = None
    train_reports: Optional[str] = None  # reuse precomputed reports
    test_reports: Optional[str] = None
    oracle: OracleConfig = field(default_factory=OracleConfig)
    scramble: str = augment.SCRAMBLE_NONE
    definitions: str = augment.DEFS_TEXT
    include_replacements: bool = True
    threshold: float = critical.DEFAULT_THRESHOLD
    top_k: int = DEFAULT_TOP_K
    parallelism: int = 1
    cells: Optional[List[dict]] = None

    def protocol(self, scramble: Optional[str] = None, definitions: Optional[str] = None,
                 include_replacements: Optional[bool] = None) -> augment.ProtocolConfig:
        return augment.ProtocolConfig(
            seed=self.seed,
            scramble=self.scramble if scramble is None else scramble,
            definitions=self.definitions if definitions is None else definitions,
            include_replacements=(
                self.include_replacements if include_replacements is None else include_replacements
            ),
        )

    def requested_cells(self) -> List[dict]:
        if self.cells:
            return self.cells
        return [{"scramble": self.scramble, "definitions": self.definitions}]

    def as_dict(self) -> dict:
        data = {
            "seed": self.seed,
            "output_dir": self.output_dir,
            "train_corpus": self.train_corpus,
            "test_corpus": self.test_corpus,
            "simple_dump": self.simple_dump,
            "english_dump": self.english_dump,
            "train_reports": self.train_reports,
            "test_reports": self.test_reports,
            "oracle": {
                "transport": self.oracle.transport,
                "command": self.oracle.command,
                "endpoint": self.oracle.endpoint,
                "script": self.oracle.script,
            },
            "scramble": self.scramble,
            "definitions": self.definitions,
            "include_replacements": self.include_replacements,
            "threshold": self.threshold,
            "top_k": self.top_k,
            "parallelism": self.parallelism,
            "cells": self.cells,
        }
        return data


def load_run_config(
    path: Optional[str],
    overrides: Optional[dict] = None,
    require_build_fields: bool = True,
) -> RunConfig:
    """Merge a JSON config file with flag overrides; flags win.

    Scan-only commands pass require_build_fields=False: they have no use for
    a seed or an output directory, so those may be absent.
    """
    data: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fp:
                data = json.load(fp)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    oracle_data = dict(data.get("oracle") or {})
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "oracle":
            oracle_data.update(value)
        else:
            data[key] = value
    # Env var overrides the config's oracle but loses to explicit flags.
    endpoint_override = os.environ.get(ORACLE_ENDPOINT_ENV)
    if endpoint_override and "oracle" not in (overrides or {}):
        oracle_data = {"transport": "http", "endpoint": endpoint_override}
    if data.get("seed") is None:
        if require_build_fields:
            raise ConfigError("seed is required; runs must be reproducible")
        data["seed"] = 0
    if data.get("output_dir") is None:
        if require_build_fields:
            raise ConfigError("output_dir is required")
        data["output_dir"] = "."
    config = RunConfig(
        seed=int(data["seed"]),
        output_dir=str(data["output_dir"]),
        train_corpus=data.get("train_corpus"),
        test_corpus=data.get("test_corpus"),
        simple_dump=data.get("simple_dump"),
        english_dump=data.get("english_dump"),
        train_reports=data.get("train_reports"),
        test_reports=data.get("test_reports"),
        oracle=OracleConfig(
            transport=oracle_data.get("transport", "mock"),
            command=oracle_data.get("command"),
            endpoint=oracle_data.get("endpoint"),
            script=oracle_data.get("script"),
        ),
        scramble=data.get("scramble", augment.SCRAMBLE_NONE),
        definitions=data.get("definitions", augment.DEFS_TEXT),
        include_replacements=bool(data.get("include_replacements", True)),
        threshold=float(data.get("threshold", critical.DEFAULT_THRESHOLD)),
        top_k=int(data.get("top_k", DEFAULT_TOP_K)),
        parallelism=int(data.get("parallelism", 1)),
        cells=data.get("cells"),
    )
    config.oracle.validate()
    for name in ("train_corpus", "test_corpus", "simple_dump", "english_dump",
                 "train_reports", "test_reports"):
        value = getattr(config, name)
        if value is not None and not os.path.exists(value):
            raise ConfigError(f"{name} path does not exist: {value}")
    if config.oracle.script is not None and not os.path.exists(config.oracle.script):
        raise ConfigError(f"oracle script does not exist: {config.oracle.script}")
    return config


def make_oracle(config: OracleConfig):
    if config.transport == "mock":
        script = {}
        if config.script:
            with open(config.script, "r", encoding="utf-8") as fp:
                script = json.load(fp)
        return ScriptedOracle(script)
    if config.transport == "stdio":
        return StdioOracleClient(config.command)
    return HttpOracleClient(config.endpoint)


def check_oracle(oracle) -> None:
    """Fail fast with a clear message when the bridge is unreachable."""
    try:
        oracle.tokenize("a")
    except OracleError as exc:
        raise OracleError(f"oracle is not reachable: {exc}") from exc


@dataclass
class ScanSummary:
    scanned: int = 0
    critical_examples: int = 0
    reports: int = 0
    oracle_failures: int = 0

    def as_dict(self) -> dict:
        return {
            "scanned": self.scanned,
            "critical_examples": self.critical_examples,
            "reports": self.reports,
            "oracle_failures": self.oracle_failures,
        }


def scan_corpus(
    examples: List[corpus.NliExample],
    oracles: critical.Oracles,
    threshold: float,
    top_k: int,
    parallelism: int = 1,
    summary: Optional[ScanSummary] = None,
) -> List[critical.CriticalWordReport]:
    """Find critical words for every example; failed examples are skipped.

    Output order equals input order regardless of the parallelism degree.
    """
    if summary is None:
        summary = ScanSummary()

    def work(example):
        try:
            return critical.find_critical_words(example, oracles, threshold, top_k)
        except OracleError as exc:
            return exc

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(work, examples))
    else:
        results = [work(example) for example in examples]

    reports: List[critical.CriticalWordReport] = []
    for result in results:
        summary.scanned += 1
        if isinstance(result, OracleError):
            summary.oracle_failures += 1
            continue
        if result:
            summary.critical_examples += 1
            reports.extend(result)
    summary.reports = len(reports)
    return reports


def write_reports(reports, path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        for report in reports:
            fp.write(report.to_json())
            fp.write("\n")
            count += 1
    return count


def read_reports(path) -> List[critical.CriticalWordReport]:
    reports = []
    with open(path, "r", encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if line:
                reports.append(critical.CriticalWordReport.from_json(line))
    return reports


def cell_filename(split: str, scramble: str, definitions: str, suffix: str) -> str:
    return f"{split}.{scramble}.{definitions}.{suffix}.jsonl"


def build_indices(config: RunConfig):
    simple_index = None
    english_index = None
    if config.simple_dump:
        simple_index = wiktionary.build_index(config.simple_dump, wiktionary.SIMPLE_ENGLISH)
    if config.english_dump:
        english_index = wiktionary.build_index(config.english_dump, wiktionary.ENGLISH)
    return simple_index, english_index


def run_build(config: RunConfig, log=None) -> dict:
    """Run the whole pipeline and return the manifest dict."""

    def say(message: str) -> None:
        if log is not None:
            log(message)

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    simple_index, english_index = build_indices(config)
    if simple_index is None and english_index is None:
        raise ConfigError("at least one Wiktionary dump is required to build datasets")
    defs = wiktionary.DefinitionLookup(simple_index, english_index)

    oracle = make_oracle(config.oracle)
    check_oracle(oracle)
    oracles = critical.Oracles.single(oracle)

    manifest: Dict[str, dict] = {
        "tool": "defnli",
        "manifest_version": 1,
        "seed": config.seed,
        "config": config.as_dict(),
        "scan": {},
        "files": {},
    }

    splits = {}
    for split, corpus_path, reports_path in (
        ("train", config.train_corpus, config.train_reports),
        ("test", config.test_corpus, config.test_reports),
    ):
        if corpus_path is None:
            continue
        stats = corpus.ReadStats()
        examples = list(corpus.read_corpus(corpus_path, stats))
        if reports_path is not None:
            reports = read_reports(reports_path)
            scan = ScanSummary(scanned=len(examples), reports=len(reports))
            scan.critical_examples = len({r.example_id for r in reports})
        else:
            scan = ScanSummary()
            reports = scan_corpus(
                examples, oracles, config.threshold, config.top_k, config.parallelism, scan
            )
        say(f"{split}: {scan.scanned} examples, {scan.reports} critical-word reports")
        manifest["scan"][split] = {**scan.as_dict(), "ingest_skips": stats.skipped}
        splits[split] = (examples, reports)

    if not splits:
        raise ConfigError("no corpus configured; nothing to build")

    for cell in config.requested_cells():
        scramble = cell.get("scramble", config.scramble)
        definitions = cell.get("definitions", config.definitions)
        train_full_path = None

        for split, (examples, reports) in splits.items():
            protocol = config.protocol(scramble=scramble, definitions=definitions,
                                       include_replacements=True)
            summary = augment.BuildSummary()
            full_name = cell_filename(split, scramble, definitions, SUFFIX_FULL)
            full_path = out_dir / full_name
            count = corpus.write_dataset(
                augment.build_dataset(examples, reports, defs, protocol, summary), full_path
            )
            manifest["files"][full_name] = {"count": count, **summary.as_dict()}
            say(f"wrote {full_name}: {count} examples")
            if split == "train":
                train_full_path = full_path

            verified_name = cell_filename(split, scramble, definitions, SUFFIX_VERIFIED)
            verified_count = corpus.write_dataset(
                augment.build_subset_true(corpus.read_dataset(full_path)),
                out_dir / verified_name,
            )
            manifest["files"][verified_name] = {"count": verified_count}
            say(f"wrote {verified_name}: {verified_count} examples")

        if "test" in splits:
            examples, reports = splits["test"]
            if train_full_path is not None:
                new_name = cell_filename("test", scramble, definitions, SUFFIX_NEW)
                kept = augment.build_subset_new(
                    corpus.read_dataset(
                        out_dir / cell_filename("test", scramble, definitions, SUFFIX_VERIFIED)
                    ),
                    corpus.read_dataset(train_full_path),
                )
                new_count = corpus.write_dataset(kept, out_dir / new_name)
                manifest["files"][new_name] = {"count": new_count}
                say(f"wrote {new_name}: {new_count} examples")

            tokenize_oracle = oracles.tokenize
            if tokenize_oracle is not None:
                multi_name = cell_filename("test", scramble, definitions, SUFFIX_MULTI)
                protocol = config.protocol(scramble=scramble, definitions=definitions,
                                           include_replacements=False)
                summary = augment.BuildSummary()
                multi_count = corpus.write_dataset(
                    augment.build_subset_multi(
                        examples, reports, defs, tokenize_oracle, protocol, summary
                    ),
                    out_dir / multi_name,
                )
                manifest["files"][multi_name] = {"count": multi_count, **summary.as_dict()}
                say(f"wrote {multi_name}: {multi_count} examples")

    manifest_path = out_dir / MANIFEST_NAME
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fp:
        json.dump(manifest, fp, indent=2, sort_keys=True, ensure_ascii=False)
        fp.write("\n")
    if hasattr(oracle, "close"):
        oracle.close()
    return manifest
