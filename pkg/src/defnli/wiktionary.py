"""Wiktionary dump indexing and first-sense definition extraction.

Two dictionaries are supported: the Simple English Wiktionary, consulted
first because its definitions are written in simpler language, and the
regular English Wiktionary as the fallback.
"""

from __future__ import annotations

import json
import os
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Optional

from .wikitext import strip_wikitext

SIMPLE_ENGLISH = "simple_english"
ENGLISH = "english"

INDEX_MAGIC = "defnli-dump-index"
INDEX_VERSION = 1

_PAGE_OPEN = b"<page>"
_PAGE_CLOSE = b"</page>"
_CHUNK = 1 << 20

_HEADING_RE = re.compile(r"^(={2,6})\s*(.*?)\s*=*\s*$")
_REDIRECT_RE = re.compile(r"^\s*#redirect", re.IGNORECASE)


class WiktionaryError(Exception):
    """Fatal dump problem: unreadable file or malformed XML structure."""


@dataclass
class DefinitionEntry:
    lemma: str
    pos: str
    definition: str
    source: str


@dataclass
class DumpIndex:
    """Map from article title to (byte offset, length) within one dump."""

    dump_path: str
    dictionary: str
    entries: dict
    reused: bool = False  # loaded from a persisted sidecar instead of rescanned

    def find_title(self, word: str) -> Optional[str]:
        # Titles are case-sensitive; corpus words may be sentence-capitalized.
        for candidate in (word, word.lower(), word[:1].upper() + word[1:]):
            if candidate in self.entries:
                return candidate
        return None

    def read_page(self, title: str) -> str:
        offset, length = self.entries[title]
        with open(self.dump_path, "rb") as fp:
            fp.seek(offset)
            blob = fp.read(length)
        page = _parse_page(blob, offset)
        got = page.findtext("title") or ""
        if got != title:
            raise WiktionaryError(
                f"index corrupt: offset {offset} holds {got!r}, expected {title!r}"
            )
        return page.findtext("revision/text") or ""


def _parse_page(blob: bytes, offset: int) -> ET.Element:
    try:
        return ET.fromstring(blob)
    except ET.ParseError as exc:
        raise WiktionaryError(f"malformed page XML at byte offset {offset}: {exc}") from exc


def _iter_page_spans(path):
    """Yield (offset, length) byte spans of <page>...</page> elements."""
    with open(path, "rb") as fp:
        buf = b""
        base = 0
        eof = False
        while True:
            start = buf.find(_PAGE_OPEN)
            if start < 0:
                if eof:
                    return
                drop = max(0, len(buf) - len(_PAGE_OPEN) + 1)
                base += drop
                buf = buf[drop:]
                chunk = fp.read(_CHUNK)
                if chunk:
                    buf += chunk
                else:
                    eof = True
                continue
            end = buf.find(_PAGE_CLOSE, start)
            if end < 0:
                if eof:
                    raise WiktionaryError(
                        f"unterminated <page> element at byte offset {base + start}"
                    )
                chunk = fp.read(_CHUNK)
                if chunk:
                    buf += chunk
                else:
                    eof = True
                continue
            end += len(_PAGE_CLOSE)
            yield base + start, end - start
            base += end
            buf = buf[end:]


def _index_sidecar_path(dump_path) -> str:
    return str(dump_path) + ".index.json"


def build_index(dump_path, dictionary: str, refresh: bool = False) -> DumpIndex:
    """Scan a pages-articles XML dump and index namespace-0 article offsets.

    The index is persisted beside the dump and reused on later runs when the
    dump size still matches.  Redirects and non-article namespaces are
    excluded.
    """
    if dictionary not in (SIMPLE_ENGLISH, ENGLISH):
        raise ValueError(f"unknown dictionary {dictionary!r}")
    dump_bytes = os.path.getsize(dump_path)
    sidecar = _index_sidecar_path(dump_path)
    if not refresh:
        cached = _load_sidecar(sidecar, dictionary, dump_bytes)
        if cached is not None:
            return DumpIndex(str(dump_path), dictionary, cached, reused=True)

    entries = {}
    with open(dump_path, "rb") as reader:
        for offset, length in _iter_page_spans(dump_path):
            reader.seek(offset)
            page = _parse_page(reader.read(length), offset)
            title = page.findtext("title")
            if title is None:
                raise WiktionaryError(f"page without title at byte offset {offset}")
            ns = page.findtext("ns")
            if ns is not None and ns.strip() != "0":
                continue
            if ns is None and ":" in title:
                continue
            text = page.findtext("revision/text") or ""
            if page.find("redirect") is not None or _REDIRECT_RE.match(text):
                continue
            entries[title] = (offset, length)

    try:
        with open(sidecar, "w", encoding="utf-8") as fp:
            json.dump(
                {
                    "magic": INDEX_MAGIC,
                    "version": INDEX_VERSION,
                    "dictionary": dictionary,
                    "dump_bytes": dump_bytes,
                    "titles": entries,
                },
                fp,
            )
    except OSError:
        pass  # read-only dump directory: the index still works, just unpersisted
    return DumpIndex(str(dump_path), dictionary, entries)


def _load_sidecar(sidecar: str, dictionary: str, dump_bytes: int) -> Optional[dict]:
    try:
        with open(sidecar, "r", encoding="utf-8") as fp:
            data = json.load(fp)
    except (OSError, ValueError):
        return None
    if (
        data.get("magic") != INDEX_MAGIC
        or data.get("version") != INDEX_VERSION
        or data.get("dictionary") != dictionary
        or data.get("dump_bytes") != dump_bytes
    ):
        return None
    return {title: tuple(span) for title, span in data["titles"].items()}


def _heading(line: str):
    m = _HEADING_RE.match(line)
    if not m:
        return None
    level = len(m.group(1))
    name = re.sub(r"[{}=]+", " ", m.group(2)).strip().lower()
    return level, name


def _english_region(lines: list, treat_page_as_english: bool) -> Optional[range]:
    start = None
    for i, line in enumerate(lines):
        h = _heading(line)
        if h and h[0] == 2:
            if h[1] == "english" and start is None:
                start = i + 1
            elif start is not None:
                return range(start, i)
    if start is not None:
        return range(start, len(lines))
    if treat_page_as_english:
        return range(0, len(lines))
    return None


def _first_sense(lines: list, region: range, pos: str) -> Optional[str]:
    """First numbered sense under the first heading naming `pos`."""
    want = pos.strip().lower()
    in_section = False
    for i in region:
        h = _heading(lines[i])
        if h is not None:
            if in_section:
                return None  # section ended without a usable sense line
            in_section = h[1] == want
            continue
        if not in_section:
            continue
        line = lines[i]
        if line.startswith("#") and not line.startswith(("##", "#:", "#*")):
            text = strip_wikitext(line)
            if text:  # template-only senses strip to nothing; take the next
                return text
    return None


def extract_definition(page_text: str, pos: str, dictionary: str) -> Optional[str]:
    """Walk one article body to its first numbered definition for `pos`.

    The regular English Wiktionary requires a level-2 "English" section;
    Simple English pages often omit it, in which case the page root is
    treated as the English section.
    """
    lines = page_text.split("\n")
    region = _english_region(lines, treat_page_as_english=(dictionary == SIMPLE_ENGLISH))
    if region is None:
        return None
    sense = _first_sense(lines, region, pos)
    if sense is None:
        return None
    if not sense.endswith("."):
        sense += "."
    return sense


def lookup_definition(
    word: str,
    pos: str,
    simple_index: Optional[DumpIndex] = None,
    english_index: Optional[DumpIndex] = None,
) -> Optional[DefinitionEntry]:
    """Look a lemmatized word up, Simple English Wiktionary first."""
    for index in (simple_index, english_index):
        if index is None:
            continue
        title = index.find_title(word)
        if title is None:
            continue
        definition = extract_definition(index.read_page(title), pos, index.dictionary)
        if definition is not None:
            return DefinitionEntry(
                lemma=word, pos=pos, definition=definition, source=index.dictionary
            )
    return None


def format_definition(surface_word: str, definition: str) -> str:
    """Render the definition sentence: "<word> means: <definition>."."""
    if not definition:
        raise ValueError("definition must be non-empty")
    sentence = f"{surface_word} means: {definition}"
    if not sentence.endswith("."):
        sentence += "."
    return sentence


class DefinitionLookup:
    """Cached (lemma, pos) -> DefinitionEntry resolver over both dumps."""

    def __init__(self, simple_index: Optional[DumpIndex], english_index: Optional[DumpIndex]):
        self.simple_index = simple_index
        self.english_index = english_index
        self._cache: dict = {}

    def __call__(self, lemma: str, pos: str) -> Optional[DefinitionEntry]:
        key = (lemma, pos)
        if key not in self._cache:
            self._cache[key] = lookup_definition(
                lemma, pos, self.simple_index, self.english_index
            )
        return self._cache[key]
