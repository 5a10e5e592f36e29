import json
from pathlib import Path

import pytest

from defnli import wiktionary

FIXTURES = Path(__file__).parent / "fixtures"

TABLE1_PREMISE = "A young man sits, looking out of a train window."
TABLE1_HYPOTHESIS = "The man is in his room."

TABLE2_PREMISE = "A blond man is drinking from a public fountain."
TABLE2_HYPOTHESIS = "The man is drinking water."

TABLE2_FOUNTAIN_DEF = "a natural source of water; a spring."
TABLE2_GLASS_DEF = (
    "glass is a transparent solid and is usually clear. "
    "windows and eyeglasses are made from it, as well as drinking glasses."
)


def table1_script() -> dict:
    """Scripted oracle encoding the train/side/small example."""
    blanked = "A young man sits, looking out of a [BLANK] window. " + TABLE1_HYPOTHESIS
    return {
        "vocab": ["side", "small", "train"],
        "fill": [{"text": blanked, "candidates": {"side": 0.30, "small": 0.20, "train": 0.25}}],
        "classify": [
            {
                "premise": TABLE1_PREMISE,
                "hypothesis": TABLE1_HYPOTHESIS,
                "probs": {"entailment": 0.05, "neutral": 0.15, "contradiction": 0.80},
            },
            {
                "premise": "A young man sits, looking out of a side window.",
                "hypothesis": TABLE1_HYPOTHESIS,
                "probs": {"entailment": 0.10, "neutral": 0.80, "contradiction": 0.10},
            },
            {
                "premise": "A young man sits, looking out of a small window.",
                "hypothesis": TABLE1_HYPOTHESIS,
                "probs": {"entailment": 0.15, "neutral": 0.70, "contradiction": 0.15},
            },
        ],
    }


def table2_script() -> dict:
    """Scripted oracle for the fountain/glass pipeline example."""
    blanked = "A blond man is drinking from a public [BLANK]. " + TABLE2_HYPOTHESIS
    return {
        "vocab": ["glass", "fountain", "bottle"],
        "fill": [
            {
                "text": blanked,
                "candidates": {"glass": 0.30, "fountain": 0.20, "bottle": 0.04},
            }
        ],
        "classify": [
            {
                "premise": TABLE2_PREMISE,
                "hypothesis": TABLE2_HYPOTHESIS,
                "probs": {"entailment": 0.90, "neutral": 0.07, "contradiction": 0.03},
            },
            {
                "premise": "A blond man is drinking from a public glass.",
                "hypothesis": TABLE2_HYPOTHESIS,
                "probs": {"entailment": 0.20, "neutral": 0.70, "contradiction": 0.10},
            },
        ],
    }


def write_jsonl(path: Path, records) -> Path:
    with open(path, "w", encoding="utf-8") as fp:
        for record in records:
            fp.write(json.dumps(record, ensure_ascii=False) + "\n")
    return path


def merge_scripts(*scripts) -> dict:
    merged = {"fill": [], "classify": [], "vocab": [], "pieces": {}, "tags": {}}
    for script in scripts:
        merged["fill"] += script.get("fill", [])
        merged["classify"] += script.get("classify", [])
        merged["vocab"] += script.get("vocab", [])
        merged["pieces"].update(script.get("pieces", {}))
        merged["tags"].update(script.get("tags", {}))
    return merged


def fixture_train_records():
    return [
        {"sentence1": TABLE2_PREMISE, "sentence2": TABLE2_HYPOTHESIS, "gold_label": "entailment"},
        {"sentence1": TABLE1_PREMISE, "sentence2": TABLE1_HYPOTHESIS, "gold_label": "contradiction"},
        {"sentence1": "A zebra grazes in a field.", "sentence2": "An animal eats grass.",
         "gold_label": "entailment"},
        {"sentence1": "A man smiles at a child.", "sentence2": "Someone is happy.",
         "gold_label": "entailment"},
    ]


def fixture_test_records():
    return [
        {"sentence1": "A kid sips water slowly.", "sentence2": "A child drinks liquid.",
         "gold_label": "entailment"},
        {"sentence1": "Dogs bark.", "sentence2": "Animals are loud.", "gold_label": "neutral"},
    ]


def fixture_pipeline_script() -> dict:
    """Oracle script covering every critical word of the fixture corpora."""
    zebra = {
        "vocab": ["horse", "zebra"],
        "fill": [
            {
                "text": "A [BLANK] grazes in a field. An animal eats grass.",
                "candidates": {"horse": 0.40},
            }
        ],
        "classify": [
            {
                "premise": "A zebra grazes in a field.",
                "hypothesis": "An animal eats grass.",
                "probs": {"entailment": 0.85, "neutral": 0.10, "contradiction": 0.05},
            },
            {
                "premise": "A horse grazes in a field.",
                "hypothesis": "An animal eats grass.",
                "probs": {"entailment": 0.10, "neutral": 0.80, "contradiction": 0.10},
            },
        ],
    }
    water = {
        "vocab": ["glass", "water"],
        "pieces": {"water": ["wa", "ter"]},
        "fill": [
            {
                "text": "A kid sips [BLANK] slowly. A child drinks liquid.",
                "candidates": {"glass": 0.30},
            }
        ],
        "classify": [
            {
                "premise": "A kid sips water slowly.",
                "hypothesis": "A child drinks liquid.",
                "probs": {"entailment": 0.80, "neutral": 0.15, "contradiction": 0.05},
            },
            {
                "premise": "A kid sips glass slowly.",
                "hypothesis": "A child drinks liquid.",
                "probs": {"entailment": 0.10, "neutral": 0.80, "contradiction": 0.10},
            },
        ],
    }
    return merge_scripts(table1_script(), table2_script(), zebra, water)


FIXTURE_EXPECTED_COUNTS = {
    "train.all.text.full.jsonl": 4,
    "train.all.text.verified.jsonl": 2,
    "test.all.text.full.jsonl": 2,
    "test.all.text.verified.jsonl": 1,
    "test.all.text.new.jsonl": 1,
    "test.all.text.multi.jsonl": 1,
}


def make_pipeline_workspace(tmp_path: Path, seed: int = 11) -> dict:
    """Materialize corpora, oracle script, dumps, and a run config on disk."""
    tmp_path.mkdir(parents=True, exist_ok=True)
    train = write_jsonl(tmp_path / "train.jsonl", fixture_train_records())
    test = write_jsonl(tmp_path / "test.jsonl", fixture_test_records())
    script = tmp_path / "script.json"
    script.write_text(json.dumps(fixture_pipeline_script()), encoding="utf-8")
    simple = tmp_path / "simple.xml"
    simple.write_bytes((FIXTURES / "simple_wiktionary.xml").read_bytes())
    english = tmp_path / "english.xml"
    english.write_bytes((FIXTURES / "english_wiktionary.xml").read_bytes())
    return {
        "seed": seed,
        "output_dir": str(tmp_path / "out"),
        "train_corpus": str(train),
        "test_corpus": str(test),
        "simple_dump": str(simple),
        "english_dump": str(english),
        "oracle": {"transport": "mock", "script": str(script)},
        "scramble": "all",
        "definitions": "text",
    }


@pytest.fixture(scope="session")
def simple_dump_path(tmp_path_factory) -> Path:
    # Copy so the persisted .index.json sidecar lands in a writable tmp dir.
    source = FIXTURES / "simple_wiktionary.xml"
    target = tmp_path_factory.mktemp("dumps") / "simple_wiktionary.xml"
    target.write_bytes(source.read_bytes())
    return target


@pytest.fixture(scope="session")
def english_dump_path(tmp_path_factory) -> Path:
    source = FIXTURES / "english_wiktionary.xml"
    target = tmp_path_factory.mktemp("dumps") / "english_wiktionary.xml"
    target.write_bytes(source.read_bytes())
    return target


@pytest.fixture(scope="session")
def simple_index(simple_dump_path):
    return wiktionary.build_index(simple_dump_path, wiktionary.SIMPLE_ENGLISH)


@pytest.fixture(scope="session")
def english_index(english_dump_path):
    return wiktionary.build_index(english_dump_path, wiktionary.ENGLISH)


@pytest.fixture(scope="session")
def defs(simple_index, english_index):
    return wiktionary.DefinitionLookup(simple_index, english_index)
