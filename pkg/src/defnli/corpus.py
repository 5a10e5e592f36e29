"""Read and write NLI corpora as line-delimited JSON streams."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional

ENTAILMENT = "entailment"
NEUTRAL = "neutral"
CONTRADICTION = "contradiction"

# Canonical label order; argmax ties anywhere in the pipeline resolve to the
# earliest label in this tuple.
LABELS = (ENTAILMENT, NEUTRAL, CONTRADICTION)

ORIGIN_ORIGINAL = "original"
ORIGIN_REPLACEMENT = "replacement"

# Field order of the emitted JSON objects; kept stable so identical inputs
# produce byte-identical files.
OUTPUT_FIELDS = (
    "id",
    "premise",
    "hypothesis",
    "label",
    "defined_word",
    "original_word",
    "definition_text",
    "origin",
    "verified",
)


class CorpusError(Exception):
    """Fatal corpus I/O failure (unreadable file, write error)."""


@dataclass
class NliExample:
    id: str
    premise: str
    hypothesis: str
    label: str


@dataclass
class AugmentedExample:
    id: str
    premise: str
    hypothesis: str
    label: str
    defined_word: Optional[str] = None
    original_word: Optional[str] = None
    definition_text: Optional[str] = None
    origin: str = ORIGIN_ORIGINAL
    verified: bool = True

    def to_json(self) -> str:
        record = {name: getattr(self, name) for name in OUTPUT_FIELDS}
        return json.dumps(record, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "AugmentedExample":
        record = json.loads(line)
        return cls(**{name: record.get(name) for name in OUTPUT_FIELDS})


@dataclass
class ReadStats:
    """Ingest bookkeeping: how many lines were read, kept, or skipped."""

    read: int = 0
    kept: int = 0
    skipped: int = 0
    skips: list = field(default_factory=list)  # (line_number, reason)

    def skip(self, line_number: int, reason: str) -> None:
        self.skipped += 1
        self.skips.append((line_number, reason))


def _parse_line(raw: str, line_number: int) -> Optional[NliExample]:
    record = json.loads(raw)
    if not isinstance(record, dict):
        raise ValueError("not a JSON object")
    # Raw SNLI lines carry sentence1/sentence2/gold_label; our own output
    # carries premise/hypothesis/label.  First matching scheme wins.
    if "sentence1" in record:
        premise = record.get("sentence1", "")
        hypothesis = record.get("sentence2", "")
        label = record.get("gold_label", "")
    else:
        premise = record.get("premise", "")
        hypothesis = record.get("hypothesis", "")
        label = record.get("label", "")
    if label not in LABELS:
        return None
    premise = (premise or "").strip()
    hypothesis = (hypothesis or "").strip()
    if not premise or not hypothesis:
        return None
    example_id = record.get("id")
    if example_id is None:
        example_id = str(line_number)
    return NliExample(id=str(example_id), premise=premise, hypothesis=hypothesis, label=label)


def read_corpus(path, stats: Optional[ReadStats] = None) -> Iterator[NliExample]:
    """Yield examples from a JSONL corpus file in input order.

    Malformed lines and records without a usable gold label are counted as
    skips and the stream continues; an unreadable file raises CorpusError.
    """
    if stats is None:
        stats = ReadStats()
    try:
        fp: IO[str] = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    with fp:
        for line_number, raw in enumerate(fp):
            stats.read += 1
            raw = raw.strip()
            if not raw:
                stats.skip(line_number, "blank line")
                continue
            try:
                example = _parse_line(raw, line_number)
            except ValueError as exc:
                stats.skip(line_number, f"malformed JSON: {exc}")
                continue
            if example is None:
                stats.skip(line_number, "no usable label or empty text")
                continue
            stats.kept += 1
            yield example


def write_dataset(examples: Iterable[AugmentedExample], path) -> int:
    """Write one JSON object per example, in stream order. Returns the count.

    Output is UTF-8 with LF line endings and a fixed field order, so two runs
    over identical streams produce byte-identical files.
    """
    count = 0
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fp:
            for example in examples:
                fp.write(example.to_json())
                fp.write("\n")
                count += 1
    except OSError as exc:
        raise CorpusError(f"write failed at {path} after {count} records: {exc}") from exc
    return count


def read_dataset(path) -> Iterator[AugmentedExample]:
    with open(path, "r", encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if line:
                yield AugmentedExample.from_json(line)
