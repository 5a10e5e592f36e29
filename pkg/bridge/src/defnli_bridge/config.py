from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

DEFAULT_FILL_MODEL = "bert-base-uncased"
DEFAULT_CLASSIFIER_MODEL = "typeform/distilbert-base-uncased-mnli"


@dataclass
class BridgeConfig:
    fill_model_name: str = DEFAULT_FILL_MODEL
    classifier_model_name: str = DEFAULT_CLASSIFIER_MODEL
    pos_model_name: Optional[str] = None  # None: rule-based tagger
    device: str = "cpu"
    max_sequence_length: int = 384

    @classmethod
    def from_env(cls, **overrides) -> "BridgeConfig":
        values = {
            "fill_model_name": os.environ.get("DEFNLI_BRIDGE_FILL_MODEL", DEFAULT_FILL_MODEL),
            "classifier_model_name": os.environ.get(
                "DEFNLI_BRIDGE_CLASSIFIER_MODEL", DEFAULT_CLASSIFIER_MODEL
            ),
            "pos_model_name": os.environ.get("DEFNLI_BRIDGE_POS_MODEL") or None,
            "device": os.environ.get("DEFNLI_BRIDGE_DEVICE", "cpu"),
            "max_sequence_length": int(os.environ.get("DEFNLI_BRIDGE_MAX_SEQ_LEN", "384")),
        }
        for key, value in overrides.items():
            if value is not None:
                values[key] = value
        return cls(**values)
