"""Mark words whose plausible replacements flip the classifier's label.

A word is critical when some masked-LM fill candidate with probability above
the threshold, spliced in place of the word, changes the classifier's argmax
label relative to the original example.  Only whole words that occur exactly
once across premise and hypothesis are considered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Tuple

from .corpus import NliExample
from .morphology import tag_and_lemmatize, tokenize_words
from .oracle import BLANK, DEFAULT_TOP_K

PREMISE = "premise"
HYPOTHESIS = "hypothesis"

DEFAULT_THRESHOLD = 0.05


@dataclass
class Oracles:
    """Handles for the four oracle ops; they may all be one bridge."""

    fill: object
    classify: object
    tokenize: object = None
    tag: object = None

    @classmethod
    def single(cls, oracle) -> "Oracles":
        return cls(fill=oracle, classify=oracle, tokenize=oracle, tag=oracle)


@dataclass
class Flip:
    token: str
    prob: float
    label: str


@dataclass
class CriticalWordReport:
    example_id: str
    sentence: str  # "premise" or "hypothesis"
    word_index: int
    surface: str
    lemma: str
    pos: str
    original_label: str
    flips: List[Flip] = field(default_factory=list)

    def to_json(self) -> str:
        record = {
            "example_id": self.example_id,
            "sentence": self.sentence,
            "word_index": self.word_index,
            "surface": self.surface,
            "lemma": self.lemma,
            "pos": self.pos,
            "original_label": self.original_label,
            "flips": [{"token": f.token, "prob": f.prob, "label": f.label} for f in self.flips],
        }
        return json.dumps(record, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "CriticalWordReport":
        record = json.loads(line)
        flips = [Flip(f["token"], f["prob"], f["label"]) for f in record.pop("flips")]
        return cls(flips=flips, **record)


def _splice(sentence: str, span: Tuple[int, int], replacement: str) -> str:
    start, end = span
    return sentence[:start] + replacement + sentence[end:]


def _fill_context(example: NliExample, sentence: str, blanked: str) -> str:
    # The fill oracle sees both sentences with the blank in place.
    if sentence == PREMISE:
        return blanked + " " + example.hypothesis
    return example.premise + " " + blanked


def candidate_words(example: NliExample):
    """Yield (sentence, word_index, surface, span) for eligible words.

    Eligible words are alphabetic and occur exactly once, case-insensitively,
    across premise and hypothesis combined.
    """
    tokenized = {
        PREMISE: tokenize_words(example.premise),
        HYPOTHESIS: tokenize_words(example.hypothesis),
    }
    counts: dict = {}
    for tokens in tokenized.values():
        for surface, _ in tokens:
            if surface.isalpha():
                key = surface.lower()
                counts[key] = counts.get(key, 0) + 1
    for sentence in (PREMISE, HYPOTHESIS):
        for index, (surface, span) in enumerate(tokenized[sentence]):
            if surface.isalpha() and counts[surface.lower()] == 1:
                yield sentence, index, surface, span


def find_critical_words(
    example: NliExample,
    oracles: Oracles,
    threshold: float = DEFAULT_THRESHOLD,
    top_k: int = DEFAULT_TOP_K,
) -> List[CriticalWordReport]:
    """Apply the flip criterion to every eligible word of one example.

    The original example's argmax label is computed once and reused for all
    candidate comparisons.  Fill candidates must clear the probability
    threshold, be a single subword piece, be alphabetic, and differ from the
    original word; a report is emitted only when at least one candidate flips
    the label.
    """
    original_label = oracles.classify.classify(example.premise, example.hypothesis).argmax()
    reports = []
    for sentence_name, word_index, surface, span in candidate_words(example):
        original_sentence = example.premise if sentence_name == PREMISE else example.hypothesis
        blanked = _splice(original_sentence, span, BLANK)
        candidates = oracles.fill.fill(_fill_context(example, sentence_name, blanked), top_k)
        flips = []
        for candidate in candidates:
            if candidate.prob <= threshold:
                continue
            if candidate.pieces != 1:
                continue
            if not candidate.token.isalpha():
                continue
            if candidate.token.lower() == surface.lower():
                continue
            replaced = _splice(original_sentence, span, candidate.token)
            if sentence_name == PREMISE:
                distribution = oracles.classify.classify(replaced, example.hypothesis)
            else:
                distribution = oracles.classify.classify(example.premise, replaced)
            new_label = distribution.argmax()
            if new_label != original_label:
                flips.append(Flip(token=candidate.token, prob=candidate.prob, label=new_label))
        if flips:
            flips.sort(key=lambda f: (-f.prob, f.token))
            tagged = tag_and_lemmatize(original_sentence, word_index, tagger=oracles.tag)
            reports.append(
                CriticalWordReport(
                    example_id=example.id,
                    sentence=sentence_name,
                    word_index=word_index,
                    surface=surface,
                    lemma=tagged.lemma,
                    pos=tagged.pos,
                    original_label=original_label,
                    flips=flips,
                )
            )
    return reports


def best_flip(report: CriticalWordReport) -> Tuple[str, str]:
    """Most probable flipping replacement; ties break lexicographically."""
    if not report.flips:
        raise ValueError(f"report for {report.surface!r} has no flips")
    top = min(report.flips, key=lambda f: (-f.prob, f.token))
    return top.token, top.label


def word_span(sentence: str, word_index: int) -> Tuple[int, int]:
    """Char span of the word at token position `word_index`."""
    tokens = tokenize_words(sentence)
    return tokens[word_index][1]
