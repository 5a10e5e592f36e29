"""Model-backed implementations of the four oracle ops.

fill uses a masked LM: the whole-word "[BLANK]" marker maps to a single mask
token, so every candidate is one token of the fill model by construction.
Candidate piece counts come from the classifier's tokenizer, which is also
what the tokenize op exposes.
"""

from __future__ import annotations

from typing import Dict, List

import torch

from .config import BridgeConfig
from .tagger import ModelTagger, RuleTagger

BLANK = "[BLANK]"
NLI_LABELS = ("entailment", "neutral", "contradiction")


class RequestError(ValueError):
    """Invalid request; reported in-band as an error response."""


def _normalize_label(raw: str) -> str:
    label = raw.strip().lower()
    return label


class ModelOracle:
    def __init__(self, config: BridgeConfig):
        from transformers import (
            AutoModelForMaskedLM,
            AutoModelForSequenceClassification,
            AutoTokenizer,
        )

        self.config = config
        self.device = torch.device(config.device)

        self.fill_tokenizer = AutoTokenizer.from_pretrained(config.fill_model_name)
        self.fill_model = AutoModelForMaskedLM.from_pretrained(config.fill_model_name)
        self.fill_model.to(self.device).eval()

        self.classifier_tokenizer = AutoTokenizer.from_pretrained(config.classifier_model_name)
        self.classifier = AutoModelForSequenceClassification.from_pretrained(
            config.classifier_model_name
        )
        self.classifier.to(self.device).eval()

        self._label_index: Dict[str, int] = {}
        for index, raw in self.classifier.config.id2label.items():
            label = _normalize_label(raw)
            if label in NLI_LABELS:
                self._label_index[label] = int(index)
        if set(self._label_index) != set(NLI_LABELS):
            raise RuntimeError(
                f"classifier {config.classifier_model_name} labels {self.classifier.config.id2label} "
                f"do not cover {NLI_LABELS}"
            )

        if config.pos_model_name:
            self.tagger = ModelTagger(config.pos_model_name, config.device)
        else:
            self.tagger = RuleTagger()

    # -- ops -------------------------------------------------------------

    def fill(self, text: str, top_k: int) -> List[dict]:
        if text.count(BLANK) != 1:
            raise RequestError(f"fill text must contain exactly one {BLANK}")
        masked = text.replace(BLANK, self.fill_tokenizer.mask_token)
        encoding = self.fill_tokenizer(masked, return_tensors="pt")
        self._check_length(encoding, "fill")
        mask_positions = (
            encoding["input_ids"][0] == self.fill_tokenizer.mask_token_id
        ).nonzero(as_tuple=True)[0]
        with torch.no_grad():
            logits = self.fill_model(**{k: v.to(self.device) for k, v in encoding.items()}).logits
        probs = torch.softmax(logits[0, mask_positions[0]], dim=-1)
        k = max(0, min(int(top_k), probs.shape[-1]))
        top = torch.topk(probs, k)
        candidates = []
        for prob, token_id in zip(top.values.tolist(), top.indices.tolist()):
            token = self.fill_tokenizer.convert_ids_to_tokens(token_id)
            pieces = self.classifier_tokenizer.tokenize(token)
            candidates.append({"token": token, "prob": float(prob), "pieces": max(1, len(pieces))})
        candidates.sort(key=lambda c: (-c["prob"], c["token"]))
        return candidates

    def classify(self, premise: str, hypothesis: str) -> Dict[str, float]:
        if not premise or not hypothesis:
            raise RequestError("premise and hypothesis must be non-empty")
        encoding = self.classifier_tokenizer(premise, hypothesis, return_tensors="pt")
        self._check_length(encoding, "classify")
        with torch.no_grad():
            logits = self.classifier(**{k: v.to(self.device) for k, v in encoding.items()}).logits
        probs = torch.softmax(logits[0].double(), dim=-1)
        probs = probs / probs.sum()  # exact unit sum after float32 softmax
        return {label: float(probs[self._label_index[label]]) for label in NLI_LABELS}

    def tokenize(self, word: str) -> List[str]:
        if not word:
            raise RequestError("cannot tokenize an empty string")
        pieces = self.classifier_tokenizer.tokenize(word)
        return pieces if pieces else [word]

    def tag(self, tokens: List[str]) -> List[str]:
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise RequestError("tag expects a list of token strings")
        return self.tagger.tag(tokens)

    # ----------------------------------------------------------------------

    def _check_length(self, encoding, op: str) -> None:
        length = encoding["input_ids"].shape[1]
        if length > self.config.max_sequence_length:
            raise RequestError(
                f"{op} request spans {length} tokens, over the "
                f"{self.config.max_sequence_length} limit"
            )
