"""Scramble defined words and assemble the augmented dataset matrix.

Each source example with a critical word contributes up to two augmented
examples: the original sentence pair with the critical word's definition
appended to the premise (gold label, verified), and the pair with the most
likely flipping replacement spliced in and that word's definition appended
(model-predicted label, unverified).  Words may be scrambled into random
letter strings so their embeddings carry no pretrained meaning.
"""

from __future__ import annotations

import random
import string
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional

from .corpus import (
    ORIGIN_ORIGINAL,
    ORIGIN_REPLACEMENT,
    AugmentedExample,
    NliExample,
)
from .critical import HYPOTHESIS, PREMISE, CriticalWordReport, best_flip, word_span
from .morphology import lemmatize, tokenize_words
from .wiktionary import format_definition

SCRAMBLE_NONE = "none"
SCRAMBLE_ALL = "all"
SCRAMBLE_HALF = "half"
SCRAMBLE_MODES = (SCRAMBLE_NONE, SCRAMBLE_ALL, SCRAMBLE_HALF)

DEFS_NONE = "none"
DEFS_TEXT = "text"
DEFS_SUBSTITUTION = "substitution"
DEFS_MODES = (DEFS_NONE, DEFS_TEXT, DEFS_SUBSTITUTION)

_LETTERS = string.ascii_lowercase
_MIN_LEN = 4
_MAX_LEN = 12
_MAX_RESAMPLES = 100

DROP_NO_REPORT = "no_critical_word"
DROP_NO_DEFINITION = "missing_definition"
DROP_PREDICTION_MISMATCH = "prediction_disagrees_with_gold"


@dataclass
class ProtocolConfig:
    seed: int
    scramble: str = SCRAMBLE_NONE
    definitions: str = DEFS_TEXT
    include_replacements: bool = True

    def __post_init__(self):
        if self.scramble not in SCRAMBLE_MODES:
            raise ValueError(f"scramble must be one of {SCRAMBLE_MODES}")
        if self.definitions not in DEFS_MODES:
            raise ValueError(f"definitions must be one of {DEFS_MODES}")
        if self.definitions == DEFS_SUBSTITUTION and self.scramble == SCRAMBLE_NONE:
            raise ValueError("definitions=substitution is vacuous without scrambling")


@dataclass
class ScrambleAssignment:
    original: str
    scrambled: str
    example_id: str


@dataclass
class BuildSummary:
    examples_in: int = 0
    with_reports: int = 0
    pairs_out: int = 0
    examples_out: int = 0
    drops: Counter = None
    definition_sources: Counter = None

    def __post_init__(self):
        if self.drops is None:
            self.drops = Counter()
        if self.definition_sources is None:
            self.definition_sources = Counter()

    def as_dict(self) -> dict:
        return {
            "examples_in": self.examples_in,
            "with_reports": self.with_reports,
            "pairs_out": self.pairs_out,
            "examples_out": self.examples_out,
            "drops": dict(sorted(self.drops.items())),
            "definition_sources": dict(sorted(self.definition_sources.items())),
        }


def example_rng(seed: int, example_id: str, side: str) -> random.Random:
    """Per-(example, side) rng; string seeding is stable across platforms."""
    return random.Random(f"{seed}:{example_id}:{side}")


def scramble_word(rng: random.Random, constraints: set) -> str:
    """Random lowercase string, length 4-12, avoiding the constraint words."""
    for _ in range(_MAX_RESAMPLES):
        length = rng.randint(_MIN_LEN, _MAX_LEN)
        candidate = "".join(rng.choice(_LETTERS) for _ in range(length))
        if candidate not in constraints:
            return candidate
    raise RuntimeError("could not draw a scramble string avoiding the constraint set")


def assign_scramble(rng, constraints: set, original: str, example_id: str) -> ScrambleAssignment:
    return ScrambleAssignment(
        original=original,
        scrambled=scramble_word(rng, constraints),
        example_id=example_id,
    )


def replace_words(text: str, targets: set, replacement: str) -> str:
    """Replace case-insensitive whole-word occurrences of any target."""
    out = text
    for surface, (start, end) in reversed(tokenize_words(text)):
        if surface.lower() in targets:
            out = out[:start] + replacement + out[end:]
    return out


def _constraint_words(example: NliExample, replacement_token: str, definitions: Iterable[str]) -> set:
    words = {replacement_token.lower()}
    for text in (example.premise, example.hypothesis, *definitions):
        for surface, _ in tokenize_words(text):
            words.add(surface.lower())
    return words


def _scrambled_for(config: ProtocolConfig, ordinal: int) -> bool:
    if config.scramble == SCRAMBLE_ALL:
        return True
    if config.scramble == SCRAMBLE_HALF:
        return ordinal % 2 == 0
    return False


def _render_side(
    example_id: str,
    premise: str,
    hypothesis: str,
    label: str,
    surface: str,
    lemma: str,
    definition_body: Optional[str],
    config: ProtocolConfig,
    scrambled: bool,
    rng_side: str,
    constraints: set,
    origin: str,
    verified: bool,
) -> AugmentedExample:
    """Compose one emitted example from its already-spliced sentence pair.

    `surface` is the defined word as it currently appears in the sentences;
    `definition_body` is the raw definition text (None for definitions=none).
    """
    targets = {surface.lower(), lemma.lower()}
    emitted_word = surface
    if scrambled:
        rng = example_rng(config.seed, example_id, rng_side)
        assignment = assign_scramble(rng, constraints, surface, example_id)
        emitted_word = assignment.scrambled
        premise = replace_words(premise, targets, emitted_word)
        hypothesis = replace_words(hypothesis, targets, emitted_word)

    definition_sentence = None
    definition_text = None
    if config.definitions == DEFS_TEXT and definition_body is not None:
        body = definition_body
        if scrambled:
            body = replace_words(body, targets, emitted_word)
        definition_text = body
    elif config.definitions == DEFS_SUBSTITUTION and scrambled:
        # "scrambled means: original." -- the word itself instead of a definition.
        definition_text = surface if surface.endswith(".") else surface + "."

    lowercased = scrambled or definition_text is not None
    if lowercased:
        premise = premise.lower()
        hypothesis = hypothesis.lower()
        emitted_word = emitted_word.lower()
        definition_text = definition_text.lower() if definition_text is not None else None

    if definition_text is not None:
        definition_sentence = format_definition(emitted_word, definition_text)
        premise = premise + " " + definition_sentence

    return AugmentedExample(
        id=example_id,
        premise=premise,
        hypothesis=hypothesis,
        label=label,
        defined_word=emitted_word if definition_text is not None else None,
        original_word=lemma,
        definition_text=definition_text,
        origin=origin,
        verified=verified,
    )


def build_pair(
    example: NliExample,
    report: CriticalWordReport,
    defs,
    config: ProtocolConfig,
    ordinal: int = 0,
    drops: Optional[Counter] = None,
    sources: Optional[Counter] = None,
) -> List[AugmentedExample]:
    """Build the up-to-two augmented examples for one critical-word report.

    Definitions for both the critical word and its best flipping replacement
    must exist, otherwise the pair contributes nothing.  `ordinal` is the
    pair's position among emitted pairs, which drives the half-scrambling
    split.
    """
    if report.example_id != example.id:
        raise ValueError("report does not belong to example")
    if drops is None:
        drops = Counter()

    # Eq. 2 compares against the model's own argmax on the original example;
    # when that disagrees with the gold label the flip baseline is unusable.
    if report.original_label != example.label:
        drops[DROP_PREDICTION_MISMATCH] += 1
        return []

    replacement_token, flipped_label = best_flip(report)
    replacement_lemma = lemmatize(replacement_token, report.pos)
    original_entry = defs(report.lemma, report.pos)
    replacement_entry = defs(replacement_lemma, report.pos)
    if original_entry is None or replacement_entry is None:
        drops[DROP_NO_DEFINITION] += 1
        return []

    scrambled = _scrambled_for(config, ordinal)
    constraints = _constraint_words(
        example, replacement_token, (original_entry.definition, replacement_entry.definition)
    )
    if sources is not None:
        sources[original_entry.source] += 1
        if config.include_replacements:
            sources[replacement_entry.source] += 1

    results = [
        _render_side(
            example_id=example.id,
            premise=example.premise,
            hypothesis=example.hypothesis,
            label=example.label,
            surface=report.surface,
            lemma=report.lemma,
            definition_body=original_entry.definition,
            config=config,
            scrambled=scrambled,
            rng_side="original",
            constraints=constraints,
            origin=ORIGIN_ORIGINAL,
            verified=True,
        )
    ]

    if config.include_replacements:
        span = word_span(
            example.premise if report.sentence == PREMISE else example.hypothesis,
            report.word_index,
        )
        premise, hypothesis = example.premise, example.hypothesis
        if report.sentence == PREMISE:
            premise = premise[: span[0]] + replacement_token + premise[span[1] :]
        else:
            hypothesis = hypothesis[: span[0]] + replacement_token + hypothesis[span[1] :]
        results.append(
            _render_side(
                example_id=example.id,
                premise=premise,
                hypothesis=hypothesis,
                label=flipped_label,
                surface=replacement_token,
                lemma=replacement_lemma,
                definition_body=replacement_entry.definition,
                config=config,
                scrambled=scrambled,
                rng_side="replacement",
                constraints=constraints,
                origin=ORIGIN_REPLACEMENT,
                verified=False,
            )
        )
    return results


def select_report(reports: List[CriticalWordReport]) -> Optional[CriticalWordReport]:
    """One critical word per example: earliest position, premise first."""
    if not reports:
        return None
    order = {PREMISE: 0, HYPOTHESIS: 1}
    return min(reports, key=lambda r: (order[r.sentence], r.word_index))


def group_reports(reports: Iterable[CriticalWordReport]) -> Dict[str, List[CriticalWordReport]]:
    grouped: Dict[str, List[CriticalWordReport]] = {}
    for report in reports:
        grouped.setdefault(report.example_id, []).append(report)
    return grouped


def build_dataset(
    corpus: Iterable[NliExample],
    reports: Iterable[CriticalWordReport],
    defs,
    config: ProtocolConfig,
    summary: Optional[BuildSummary] = None,
) -> Iterator[AugmentedExample]:
    """Concatenated build_pair outputs in corpus order."""
    if summary is None:
        summary = BuildSummary()
    grouped = group_reports(reports)
    ordinal = 0
    for example in corpus:
        summary.examples_in += 1
        report = select_report(grouped.get(example.id, []))
        if report is None:
            summary.drops[DROP_NO_REPORT] += 1
            continue
        summary.with_reports += 1
        emitted = build_pair(
            example,
            report,
            defs,
            config,
            ordinal=ordinal,
            drops=summary.drops,
            sources=summary.definition_sources,
        )
        if not emitted:
            continue
        ordinal += 1
        summary.pairs_out += 1
        summary.examples_out += len(emitted)
        yield from emitted


def build_subset_true(dataset: Iterable[AugmentedExample]) -> Iterator[AugmentedExample]:
    """Only examples whose label is the human gold label."""
    return (example for example in dataset if example.verified)


def build_subset_new(
    test_dataset: Iterable[AugmentedExample],
    train_dataset: Iterable[AugmentedExample],
) -> List[AugmentedExample]:
    """Test examples whose defined lemma never occurs as a train defined lemma."""
    train_lemmas = {ex.original_word for ex in train_dataset if ex.original_word}
    return [
        example
        for example in test_dataset
        if example.original_word and example.original_word not in train_lemmas
    ]


def build_subset_multi(
    corpus: Iterable[NliExample],
    reports: Iterable[CriticalWordReport],
    defs,
    tokenize_oracle,
    config: ProtocolConfig,
    summary: Optional[BuildSummary] = None,
) -> Iterator[AugmentedExample]:
    """Verified examples built around multi-subword critical words.

    Selects examples having any critical word whose lemma spans two or more
    subword pieces and has a definition; among those words the one with the
    highest-probability flip wins.  Unlike build_pair, only the chosen word's
    own definition is required, and only the original side is emitted.
    """
    if summary is None:
        summary = BuildSummary()
    grouped = group_reports(reports)
    order = {PREMISE: 0, HYPOTHESIS: 1}
    ordinal = 0
    for example in corpus:
        summary.examples_in += 1
        eligible = []
        for report in grouped.get(example.id, []):
            if len(tokenize_oracle.tokenize(report.lemma)) < 2:
                continue
            if defs(report.lemma, report.pos) is None:
                continue
            eligible.append(report)
        if not eligible:
            summary.drops[DROP_NO_REPORT] += 1
            continue
        report = min(
            eligible,
            key=lambda r: (-max(f.prob for f in r.flips), order[r.sentence], r.word_index),
        )
        if report.original_label != example.label:
            summary.drops[DROP_PREDICTION_MISMATCH] += 1
            continue
        summary.with_reports += 1
        entry = defs(report.lemma, report.pos)
        summary.definition_sources[entry.source] += 1
        scrambled = _scrambled_for(config, ordinal)
        constraints = _constraint_words(example, report.surface, (entry.definition,))
        ordinal += 1
        summary.pairs_out += 1
        summary.examples_out += 1
        yield _render_side(
            example_id=example.id,
            premise=example.premise,
            hypothesis=example.hypothesis,
            label=example.label,
            surface=report.surface,
            lemma=report.lemma,
            definition_body=entry.definition,
            config=config,
            scrambled=scrambled,
            rng_side="original",
            constraints=constraints,
            origin=ORIGIN_ORIGINAL,
            verified=True,
        )
