import logging

import pytest
from hypothesis import given, strategies as st

from defnli import morphology
from defnli.morphology import (
    guess_pos,
    lemmatize,
    tag_and_lemmatize,
    tokenize_words,
)

from conftest import TABLE1_PREMISE


def test_tokenize_table1_premise():
    surfaces = [t[0] for t in tokenize_words(TABLE1_PREMISE)]
    assert surfaces == [
        "A", "young", "man", "sits", ",", "looking", "out", "of", "a", "train", "window", ".",
    ]


def test_tokenize_empty():
    assert tokenize_words("") == []


def test_tokenize_hyphenated_word_kept_whole():
    assert [t[0] for t in tokenize_words("state-of-the-art")] == ["state-of-the-art"]


def test_tokenize_leading_and_trailing_punctuation():
    assert [t[0] for t in tokenize_words("'Hello!'")] == ["'", "Hello", "!", "'"]


def test_tokenize_spans_address_original_text():
    sentence = "A man, smiling."
    for surface, (start, end) in tokenize_words(sentence):
        assert sentence[start:end] == surface


@given(st.text(max_size=60))
def test_tokenize_spans_reconstruct_sentence(sentence):
    tokens = tokenize_words(sentence)
    previous_end = 0
    rebuilt = []
    for surface, (start, end) in tokens:
        assert start >= previous_end
        assert sentence[start:end] == surface
        # Characters between tokens are whitespace only.
        assert sentence[previous_end:start].strip() == ""
        rebuilt.append(sentence[previous_end:start] + surface)
        previous_end = end
    rebuilt.append(sentence[previous_end:])
    assert "".join(rebuilt) == sentence


@pytest.mark.parametrize(
    "word,pos,lemma",
    [
        ("dogs", "noun", "dog"),
        ("drinking", "verb", "drink"),
        ("children", "noun", "child"),
        ("glasses", "noun", "glass"),
        ("glass", "noun", "glass"),
        ("flies", "noun", "fly"),
        ("running", "verb", "run"),
        ("making", "verb", "make"),
        ("stopped", "verb", "stop"),
        ("loved", "verb", "love"),
        ("falling", "verb", "fall"),
        ("goes", "verb", "go"),
        ("tried", "verb", "try"),
        ("visited", "verb", "visit"),
        ("sat", "verb", "sit"),
        ("drank", "verb", "drink"),
        ("bigger", "adjective", "big"),
        ("happier", "adjective", "happy"),
        ("happiest", "adjective", "happy"),
        ("nicer", "adjective", "nice"),
        ("fountain", "noun", "fountain"),
        ("Fountain", "noun", "fountain"),
        ("quickly", "adverb", "quickly"),
        ("men", "noun", "man"),
        ("buses", "noun", "bus"),
        ("lenses", "noun", "lens"),
    ],
)
def test_lemma_examples(word, pos, lemma):
    assert lemmatize(word, pos) == lemma


_WORDS = st.text(alphabet=st.characters(min_codepoint=97, max_codepoint=122), min_size=1, max_size=24)
_POS = st.sampled_from(["noun", "verb", "adjective", "adverb", "preposition"])


@given(word=_WORDS, pos=_POS)
def test_lemmatize_idempotent(word, pos):
    once = lemmatize(word, pos)
    assert lemmatize(once, pos) == once


@given(word=_WORDS, pos=_POS)
def test_lemma_is_lowercase(word, pos):
    assert lemmatize(word.upper(), pos) == lemmatize(word, pos)
    assert lemmatize(word, pos) == lemmatize(word, pos).lower()


def test_guess_pos_contextual():
    tokens = tokenize_words("A man is drinking water.")
    drinking = [t[0] for t in tokens].index("drinking")
    assert guess_pos(tokens, drinking) == "verb"

    tokens = tokenize_words("A drinking fountain works.")
    drinking = [t[0] for t in tokens].index("drinking")
    assert guess_pos(tokens, drinking) == "noun"


def test_tag_and_lemmatize_builtin():
    tagged = tag_and_lemmatize("Two dogs are running.", 1)
    assert tagged.surface == "dogs"
    assert tagged.pos == "noun"
    assert tagged.lemma == "dog"

    tagged = tag_and_lemmatize("A man is drinking water.", 3)
    assert tagged.pos == "verb"
    assert tagged.lemma == "drink"

    tagged = tag_and_lemmatize("The children sat.", 1)
    assert tagged.pos == "noun"
    assert tagged.lemma == "child"


class _OracleTagger:
    def tag(self, tokens):
        return ["VERB" if token == "saw" else "NOUN" for token in tokens]


class _BrokenTagger:
    def tag(self, tokens):
        raise RuntimeError("bridge down")


def test_tag_and_lemmatize_with_oracle_tagger():
    tagged = tag_and_lemmatize("He saw it.", 1, tagger=_OracleTagger())
    assert tagged.pos == "verb"
    assert tagged.lemma == "see"


def test_tagger_failure_falls_back_with_warning(caplog):
    with caplog.at_level(logging.WARNING):
        tagged = tag_and_lemmatize("Two dogs are running.", 1, tagger=_BrokenTagger())
    assert tagged.pos == "noun"
    assert any("tagger" in message for message in caplog.messages)


def test_word_index_out_of_range():
    with pytest.raises(IndexError):
        tag_and_lemmatize("A man.", 9)


def test_exception_table_is_plain_text():
    from importlib import resources

    data = resources.files("defnli").joinpath("data/lemma_exceptions.tsv").read_text("utf-8")
    for line in data.splitlines():
        if line.strip():
            assert len(line.split("\t")) == 2
