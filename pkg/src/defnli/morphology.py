"""Word tokenization, part-of-speech guessing, and rule-based lemmatization.

The lemmatizer is a deliberately small approximation: an irregular-form
exception table followed by suffix rules.  Lemma quality only gates the
dictionary-lookup hit rate, so occasional mislemmatizations are acceptable.
"""

from __future__ import annotations

import logging
import re
import string
from dataclasses import dataclass
from importlib import resources
from typing import Optional

NOUN = "noun"
VERB = "verb"
ADJECTIVE = "adjective"
ADVERB = "adverb"

# Coarse tags used by the oracle "tag" op, mapped to our POS names.
COARSE_TAGS = {
    "NOUN": NOUN,
    "VERB": VERB,
    "ADJ": ADJECTIVE,
    "ADV": ADVERB,
    "OTHER": "other",
}

_PUNCT = set(string.punctuation)
_VOWELS = set("aeiouy")
_WORD_CHUNK_RE = re.compile(r"\S+")

logger = logging.getLogger(__name__)


@dataclass
class TaggedWord:
    surface: str
    index: int
    pos: str
    lemma: str


def tokenize_words(sentence: str):
    """Split a sentence into (surface, (start, end)) tokens.

    Whitespace separates chunks; leading and trailing punctuation characters
    become their own single-character tokens.  Internal punctuation (hyphens,
    apostrophes) is kept, so "state-of-the-art" stays one token.  Spans index
    into the original sentence so replacements can be spliced back.
    """
    tokens = []
    for m in _WORD_CHUNK_RE.finditer(sentence):
        chunk = m.group(0)
        start = m.start()
        lo, hi = 0, len(chunk)
        trail = []
        while lo < hi and chunk[lo] in _PUNCT:
            tokens.append((chunk[lo], (start + lo, start + lo + 1)))
            lo += 1
        while hi > lo and chunk[hi - 1] in _PUNCT:
            trail.append((chunk[hi - 1], (start + hi - 1, start + hi)))
            hi -= 1
        if hi > lo:
            tokens.append((chunk[lo:hi], (start + lo, start + hi)))
        tokens.extend(reversed(trail))
    return tokens


def _load_exceptions() -> dict:
    table = {}
    data = resources.files("defnli").joinpath("data/lemma_exceptions.tsv").read_text("utf-8")
    for line in data.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        surface, lemma = line.split("\t")
        table[surface] = lemma
    return table


_EXCEPTIONS = _load_exceptions()
# Lemmas produced by the exception table are terminal: the suffix rules must
# not touch them again ("lens" would otherwise lose its final "s").
_PROTECTED_LEMMAS = frozenset(_EXCEPTIONS.values())


def _has_vowel(word: str) -> bool:
    return any(c in _VOWELS for c in word)


def _restore_stem(stem: str) -> str:
    """Undo consonant doubling or restore a silent e after suffix removal."""
    if (
        len(stem) >= 3
        and stem[-1] == stem[-2]
        and stem[-1] not in "aeiou"
        and stem[-2:] not in ("ll", "ss", "zz", "ff")
    ):
        return stem[:-1]
    if (
        3 <= len(stem) <= 4
        and stem[-1] not in "aeiouwxy"
        and stem[-2] in "aeiou"
        and stem[-3] not in "aeiou"
    ):
        return stem + "e"
    return stem


def _noun_once(w: str) -> str:
    if len(w) >= 5 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) <= 3 or w.endswith("ss"):
        return w
    for suffix in ("sses", "xes", "zes", "ches", "shes"):
        if w.endswith(suffix):
            return w[:-2]
    if w.endswith("s") and not w.endswith(("us", "is")):
        return w[:-1]
    return w


def _verb_once(w: str) -> str:
    if w.endswith("ing") and len(w) >= 5 and _has_vowel(w[:-3]):
        return _restore_stem(w[:-3])
    if len(w) >= 5 and w.endswith("ied"):
        return w[:-3] + "y"
    if w.endswith("ed") and len(w) >= 5 and _has_vowel(w[:-2]):
        return _restore_stem(w[:-2])
    if len(w) >= 5 and w.endswith("ies"):
        return w[:-3] + "y"
    if w.endswith("es") and w[:-2].endswith(("s", "x", "z", "ch", "sh", "o")):
        return w[:-2]
    if len(w) >= 4 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return w


def _adjective_once(w: str) -> str:
    if len(w) >= 5 and w.endswith("ier"):
        return w[:-3] + "y"
    if len(w) >= 6 and w.endswith("iest"):
        return w[:-4] + "y"
    if len(w) >= 6 and w.endswith("est"):
        return _restore_stem(w[:-3])
    if len(w) >= 5 and w.endswith("er"):
        return _restore_stem(w[:-2])
    return w


_RULES = {NOUN: _noun_once, VERB: _verb_once, ADJECTIVE: _adjective_once}


def lemmatize(word: str, pos: str) -> str:
    """Lowercase dictionary form of `word` for the given part of speech.

    Runs the suffix rules to a fixed point so the result is idempotent.
    """
    w = word.lower()
    rule = _RULES.get(pos)
    for _ in range(100):
        if w in _EXCEPTIONS:
            if _EXCEPTIONS[w] == w:
                return w
            w = _EXCEPTIONS[w]
            continue
        if w in _PROTECTED_LEMMAS or rule is None:
            return w
        new = rule(w)
        if new == w:
            return w
        w = new
    return w


_DETERMINERS = {
    "a", "an", "the", "this", "that", "these", "those", "his", "her", "its",
    "their", "my", "your", "our", "some", "any", "no", "every", "each",
}
_AUXILIARIES = {
    "is", "are", "was", "were", "be", "been", "being", "am",
    "has", "have", "had", "do", "does", "did",
    "will", "would", "can", "could", "may", "might", "must", "shall", "should",
}
_PREPOSITIONS = {
    "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "onto",
    "over", "under", "about", "after", "before", "between", "through",
    "during", "against", "among", "around", "near", "out", "off", "up", "down",
}
_PRONOUNS = {"i", "you", "he", "she", "it", "we", "they", "him", "them", "me", "us"}
_CONJUNCTIONS = {"and", "or", "but", "nor", "so", "yet", "because", "although", "while", "if", "when", "than", "as"}
_ADJECTIVE_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less")


def _previous_word(tokens, index: int) -> Optional[str]:
    for i in range(index - 1, -1, -1):
        surface = tokens[i][0]
        if surface.isalpha():
            return surface.lower()
    return None


def guess_pos(tokens, index: int) -> str:
    """Rule-based part-of-speech guess for one token in its sentence."""
    word = tokens[index][0].lower()
    if word in _DETERMINERS:
        return "determiner"
    if word in _PREPOSITIONS:
        return "preposition"
    if word in _PRONOUNS:
        return "pronoun"
    if word in _CONJUNCTIONS:
        return "conjunction"
    if word in _AUXILIARIES:
        return VERB
    if not word.isalpha():
        return "other"
    if word.endswith("ly") and len(word) > 3:
        return ADVERB
    previous = _previous_word(tokens, index)
    if word.endswith(("ing", "ed")):
        if previous in _AUXILIARIES or previous == "to":
            return VERB
        if previous in _DETERMINERS:
            return NOUN
        return VERB
    if word.endswith(_ADJECTIVE_SUFFIXES):
        return ADJECTIVE
    return NOUN


def tag_and_lemmatize(sentence: str, word_index: int, tagger=None) -> TaggedWord:
    """POS-tag and lemmatize the word at `word_index` of the sentence.

    `tagger` is an oracle handle exposing tag(tokens) -> coarse tags; when it
    is missing or unreachable the builtin rule tagger is used instead.
    """
    tokens = tokenize_words(sentence)
    if not 0 <= word_index < len(tokens):
        raise IndexError(f"word index {word_index} out of range for {sentence!r}")
    surface = tokens[word_index][0]
    pos = None
    if tagger is not None:
        try:
            tags = tagger.tag([t[0] for t in tokens])
            pos = COARSE_TAGS.get(tags[word_index], "other")
        except Exception as exc:
            logger.warning("tagger oracle unavailable (%s); using builtin rules", exc)
            pos = None
    if pos is None:
        pos = guess_pos(tokens, word_index)
    return TaggedWord(surface=surface, index=word_index, pos=pos, lemma=lemmatize(surface, pos))
