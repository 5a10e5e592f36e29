"""POS tagging for the "tag" op: a compact rule tagger by default, or a
token-classification model when one is configured."""

from __future__ import annotations

from typing import List

COARSE = ("NOUN", "VERB", "ADJ", "ADV", "OTHER")

_DETERMINERS = {
    "a", "an", "the", "this", "that", "these", "those", "his", "her", "its",
    "their", "my", "your", "our", "some", "any", "no", "every", "each",
}
_AUXILIARIES = {
    "is", "are", "was", "were", "be", "been", "being", "am",
    "has", "have", "had", "do", "does", "did",
    "will", "would", "can", "could", "may", "might", "must", "shall", "should",
}
_CLOSED = _DETERMINERS | {
    "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "and",
    "or", "but", "not", "as", "than", "if", "when", "while", "because",
    "i", "you", "he", "she", "it", "we", "they", "him", "them", "me", "us",
}
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less", "al", "ic")

# Universal POS tags from token-classification models, collapsed.
_UPOS_TO_COARSE = {
    "NOUN": "NOUN", "PROPN": "NOUN",
    "VERB": "VERB", "AUX": "VERB",
    "ADJ": "ADJ",
    "ADV": "ADV",
}


class RuleTagger:
    def tag(self, tokens: List[str]) -> List[str]:
        tags = []
        for index, token in enumerate(tokens):
            tags.append(self._tag_one(tokens, index, token))
        return tags

    @staticmethod
    def _previous_word(tokens, index):
        for i in range(index - 1, -1, -1):
            if tokens[i].isalpha():
                return tokens[i].lower()
        return None

    def _tag_one(self, tokens, index, token) -> str:
        word = token.lower()
        if not word.isalpha() or word in _CLOSED:
            return "OTHER"
        if word in _AUXILIARIES:
            return "VERB"
        if word.endswith("ly") and len(word) > 3:
            return "ADV"
        previous = self._previous_word(tokens, index)
        if word.endswith(("ing", "ed")):
            if previous in _DETERMINERS:
                return "NOUN"
            return "VERB"
        if word.endswith(_ADJ_SUFFIXES) and len(word) > 4:
            return "ADJ"
        return "NOUN"


class ModelTagger:
    """Token-classification tagger (e.g. a BERT fine-tuned for UPOS)."""

    def __init__(self, model_name: str, device: str = "cpu"):
        from transformers import pipeline

        self._pipe = pipeline(
            "token-classification",
            model=model_name,
            device=-1 if device == "cpu" else device,
            aggregation_strategy="first",
        )

    def tag(self, tokens: List[str]) -> List[str]:
        # Joining on spaces keeps a 1:1 word alignment for whole-word tokens.
        entities = self._pipe(" ".join(tokens))
        tags = ["OTHER"] * len(tokens)
        spans = []
        offset = 0
        for token in tokens:
            spans.append((offset, offset + len(token)))
            offset += len(token) + 1
        for entity in entities:
            for i, (start, end) in enumerate(spans):
                if entity["start"] < end and entity["end"] > start:
                    tags[i] = _UPOS_TO_COARSE.get(entity["entity_group"], "OTHER")
        return tags
