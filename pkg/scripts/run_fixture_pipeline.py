#!/usr/bin/env python3
"""End-to-end demo on bundled fixtures: index two miniature Wiktionary dumps,
scan a six-example corpus for critical words against a scripted oracle served
over stdio, build the full dataset matrix, and print the stats table.

Usage: python scripts/run_fixture_pipeline.py [workdir]
"""

import json
import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))
sys.path.insert(0, str(REPO / "tests"))

from defnli import cli  # noqa: E402
from conftest import fixture_pipeline_script, fixture_test_records, fixture_train_records  # noqa: E402


def main() -> int:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else REPO / "demo_out"
    workdir.mkdir(parents=True, exist_ok=True)

    for name, records in (("train.jsonl", fixture_train_records()),
                          ("test.jsonl", fixture_test_records())):
        with open(workdir / name, "w", encoding="utf-8") as fp:
            for record in records:
                fp.write(json.dumps(record) + "\n")
    script_path = workdir / "oracle_script.json"
    script_path.write_text(json.dumps(fixture_pipeline_script(), indent=2), encoding="utf-8")
    for dump in ("simple_wiktionary.xml", "english_wiktionary.xml"):
        shutil.copy(REPO / "tests" / "fixtures" / dump, workdir / dump)

    config = {
        "seed": 11,
        "output_dir": str(workdir / "datasets"),
        "train_corpus": str(workdir / "train.jsonl"),
        "test_corpus": str(workdir / "test.jsonl"),
        "simple_dump": str(workdir / "simple_wiktionary.xml"),
        "english_dump": str(workdir / "english_wiktionary.xml"),
        "oracle": {
            "transport": "stdio",
            "command": [sys.executable, "-m", "defnli.mock_server", str(script_path)],
        },
        "scramble": "all",
        "definitions": "text",
        "cells": [
            {"scramble": "all", "definitions": "text"},
            {"scramble": "all", "definitions": "substitution"},
            {"scramble": "none", "definitions": "text"},
            {"scramble": "half", "definitions": "text"},
        ],
    }
    config_path = workdir / "config.json"
    config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")

    steps = [
        ["index", "--simple-dump", config["simple_dump"], "--english-dump", config["english_dump"]],
        ["find-critical", "--config", str(config_path), "--out", str(workdir / "reports.jsonl")],
        ["build", "--config", str(config_path)],
        ["stats", "--dataset-dir", config["output_dir"]],
    ]
    for step in steps:
        print(f"\n$ defnli {' '.join(step)}", file=sys.stderr)
        rc = cli.main(step)
        if rc != 0:
            return rc
    print(f"\ndone; datasets in {config['output_dir']}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
