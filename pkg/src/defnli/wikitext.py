"""Best-effort wikitext markup stripping for definition sense lines."""

from __future__ import annotations

import re

# Templates whose visible rendering is their last positional argument, e.g.
# {{l|en|drink}} displays as a link to "drink".  Everything else renders as
# nothing when stripped.
_LINK_TEMPLATES = {"l", "link", "m", "mention"}

_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_INNER_TEMPLATE_RE = re.compile(r"\{\{([^{}]*)\}\}")
_PIPED_LINK_RE = re.compile(r"\[\[[^\[\]|]*\|([^\[\]]*)\]\]")
_PLAIN_LINK_RE = re.compile(r"\[\[([^\[\]]*)\]\]")
_WHITESPACE_RE = re.compile(r"\s+")


def _render_template(body: str) -> str:
    parts = body.split("|")
    name = parts[0].strip().lower()
    if name in _LINK_TEMPLATES:
        positional = [p for p in parts[1:] if "=" not in p]
        if positional:
            return positional[-1].strip()
    return ""


def strip_wikitext(markup: str, warnings: list | None = None) -> str:
    """Strip wiki markup from one line of text.

    Handles piped and plain links, nested templates (innermost first),
    bold/italic quote runs, HTML comments, and sense-line "#" prefixes, then
    collapses whitespace.  Unbalanced delimiters are stripped best-effort and
    appended to ``warnings`` when a list is given.
    """
    text = _COMMENT_RE.sub("", markup)

    # Resolve templates innermost-first so nesting unwinds correctly.
    for _ in range(50):
        text, n = _INNER_TEMPLATE_RE.subn(lambda m: _render_template(m.group(1)), text)
        if n == 0:
            break
    if "{{" in text or "}}" in text:
        if warnings is not None:
            warnings.append("unbalanced template delimiters")
        text = text.replace("{{", " ").replace("}}", " ")

    for _ in range(10):
        text, n1 = _PIPED_LINK_RE.subn(lambda m: m.group(1), text)
        text, n2 = _PLAIN_LINK_RE.subn(lambda m: m.group(1), text)
        if n1 == n2 == 0:
            break
    if "[[" in text or "]]" in text:
        if warnings is not None:
            warnings.append("unbalanced link delimiters")
        text = text.replace("[[", " ").replace("]]", " ")

    text = text.replace("'''", "").replace("''", "")
    text = text.lstrip("#:* \t")
    text = _WHITESPACE_RE.sub(" ", text).strip()
    return text
