"""Client side of the language-model bridge protocol, plus a scripted mock.

The wire format is line-delimited JSON over a child process's stdio or HTTP
POST to a single endpoint.  Requests carry integer ids; responses may arrive
out of order and are correlated by id.  Four ops exist: fill, classify,
tokenize, tag.
"""

from __future__ import annotations

import itertools
import json
import subprocess
import threading
import urllib.request
from dataclasses import dataclass
from typing import Dict, List, Optional

from .corpus import LABELS

BLANK = "[BLANK]"
DEFAULT_TOP_K = 50
PROB_TOLERANCE = 1e-6


class OracleError(Exception):
    """Bridge failure: timeout, protocol violation, or in-band error."""


@dataclass
class FillCandidate:
    token: str
    prob: float
    pieces: int


@dataclass
class LabelDistribution:
    probs: Dict[str, float]

    def argmax(self) -> str:
        # Ties resolve to the earliest label in canonical order.
        return max(LABELS, key=lambda label: (self.probs[label], -LABELS.index(label)))


def _validate_distribution(probs: dict) -> LabelDistribution:
    if set(probs) != set(LABELS):
        raise OracleError(f"label distribution must cover {LABELS}, got {sorted(probs)}")
    total = sum(probs.values())
    if abs(total - 1.0) > PROB_TOLERANCE:
        raise OracleError(f"label probabilities sum to {total}, expected 1")
    return LabelDistribution({label: float(probs[label]) for label in LABELS})


def order_candidates(candidates: List[FillCandidate]) -> List[FillCandidate]:
    """Non-increasing probability; equal probabilities break lexicographically."""
    return sorted(candidates, key=lambda c: (-c.prob, c.token))


def _check_fill_text(text: str) -> None:
    if text.count(BLANK) != 1:
        raise ValueError(f"fill text must contain exactly one {BLANK} marker")


class ScriptedOracle:
    """Deterministic in-process oracle driven by a plain script dict.

    Script keys (all optional):
      fill:     list of {"text", "candidates": {token: prob}}
      classify: list of {"premise", "hypothesis", "probs": {label: prob}}
      vocab:    list of single-piece tokens
      pieces:   {word: [piece, ...]} explicit tokenizations
      tags:     {token: coarse tag}
    Unscripted classify pairs return the uniform distribution; unscripted
    fills return no candidates; unknown words tokenize to per-character
    pieces.
    """

    def __init__(self, script: Optional[dict] = None):
        script = script or {}
        self._fills = {entry["text"]: entry["candidates"] for entry in script.get("fill", [])}
        self._classifications = {
            (entry["premise"], entry["hypothesis"]): entry["probs"]
            for entry in script.get("classify", [])
        }
        self._vocab = set(script.get("vocab", []))
        self._pieces = {word: list(pieces) for word, pieces in script.get("pieces", {}).items()}
        self._tags = dict(script.get("tags", {}))

    def fill(self, text: str, top_k: int = DEFAULT_TOP_K) -> List[FillCandidate]:
        _check_fill_text(text)
        scripted = self._fills.get(text, {})
        candidates = [
            FillCandidate(token=token, prob=float(prob), pieces=len(self.tokenize(token)))
            for token, prob in scripted.items()
        ]
        return order_candidates(candidates)[: max(top_k, 0)]

    def classify(self, premise: str, hypothesis: str) -> LabelDistribution:
        if not premise or not hypothesis:
            raise ValueError("premise and hypothesis must be non-empty")
        probs = self._classifications.get((premise, hypothesis))
        if probs is None:
            probs = {label: 1.0 / len(LABELS) for label in LABELS}
        return _validate_distribution(probs)

    def tokenize(self, word: str) -> List[str]:
        if not word:
            raise ValueError("cannot tokenize an empty string")
        if word in self._pieces:
            return list(self._pieces[word])
        if word in self._vocab:
            return [word]
        return list(word)

    def tag(self, tokens: List[str]) -> List[str]:
        return [self._tags.get(token, "NOUN") for token in tokens]


def handle_request(oracle, request: dict) -> dict:
    """Serve one protocol request against any oracle object (server side)."""
    request_id = request.get("id")
    try:
        op = request.get("op")
        if op == "fill":
            candidates = oracle.fill(request["text"], int(request.get("top_k", DEFAULT_TOP_K)))
            return {
                "id": request_id,
                "candidates": [
                    {"token": c.token, "prob": c.prob, "pieces": c.pieces} for c in candidates
                ],
            }
        if op == "classify":
            dist = oracle.classify(request["premise"], request["hypothesis"])
            return {"id": request_id, "probs": dist.probs}
        if op == "tokenize":
            return {"id": request_id, "pieces": oracle.tokenize(request["text"])}
        if op == "tag":
            return {"id": request_id, "tags": oracle.tag(request["tokens"])}
        raise ValueError(f"unknown op {op!r}")
    except Exception as exc:
        return {"id": request_id, "error": str(exc)}


def serve_stdio(oracle, in_stream, out_stream) -> None:
    """Answer protocol requests from a text stream until EOF."""
    for raw in in_stream:
        line = raw.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except ValueError:
            response = {"id": None, "error": "malformed request"}
        else:
            response = handle_request(oracle, request)
        out_stream.write(json.dumps(response, ensure_ascii=False) + "\n")
        out_stream.flush()


class _ProtocolClient:
    """Shared op wrappers: id assignment, one retry, response validation."""

    def _roundtrip(self, payload: dict) -> dict:
        raise NotImplementedError

    def _request(self, op: str, fields: dict) -> dict:
        payload = dict(fields)
        payload["op"] = op
        last_error = None
        for _ in range(2):  # one retry on transport/protocol failure
            try:
                response = self._roundtrip(payload)
            except OracleError as exc:
                last_error = exc
                continue
            if "error" in response:
                raise OracleError(f"bridge error for op {op}: {response['error']}")
            return response
        raise OracleError(f"op {op} failed after retry: {last_error}")

    def fill(self, text: str, top_k: int = DEFAULT_TOP_K) -> List[FillCandidate]:
        _check_fill_text(text)
        response = self._request("fill", {"text": text, "top_k": top_k})
        try:
            candidates = [
                FillCandidate(token=str(c["token"]), prob=float(c["prob"]), pieces=int(c["pieces"]))
                for c in response["candidates"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise OracleError(f"malformed fill response: {exc}") from exc
        for candidate in candidates:
            if not 0.0 <= candidate.prob <= 1.0 or candidate.pieces < 1:
                raise OracleError(f"fill candidate out of range: {candidate}")
        return order_candidates(candidates)

    def classify(self, premise: str, hypothesis: str) -> LabelDistribution:
        response = self._request("classify", {"premise": premise, "hypothesis": hypothesis})
        try:
            return _validate_distribution(response["probs"])
        except (KeyError, TypeError) as exc:
            raise OracleError(f"malformed classify response: {exc}") from exc

    def tokenize(self, word: str) -> List[str]:
        if not word:
            raise ValueError("cannot tokenize an empty string")
        response = self._request("tokenize", {"text": word})
        pieces = response.get("pieces")
        if not isinstance(pieces, list) or not pieces:
            raise OracleError("malformed tokenize response")
        return [str(piece) for piece in pieces]

    def tag(self, tokens: List[str]) -> List[str]:
        response = self._request("tag", {"tokens": list(tokens)})
        tags = response.get("tags")
        if not isinstance(tags, list) or len(tags) != len(tokens):
            raise OracleError("malformed tag response")
        return [str(tag) for tag in tags]


class StdioOracleClient(_ProtocolClient):
    """Protocol client over a child process's stdin/stdout.

    Multiple requests may be in flight; a reader thread correlates responses
    to pending ids, so out-of-order answers are fine.
    """

    def __init__(self, command: List[str], timeout: float = 120.0):
        self.command = list(command)
        self.timeout = timeout
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._ids = itertools.count(1)
        self._lock = threading.Lock()
        self._pending: Dict[int, Optional[dict]] = {}
        self._condition = threading.Condition(self._lock)
        self._reader_error: Optional[str] = None
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        try:
            for line in self._proc.stdout:
                line = line.strip()
                if not line:
                    continue
                try:
                    response = json.loads(line)
                    response_id = response["id"]
                except (ValueError, KeyError, TypeError):
                    self._fail_all(f"malformed response line: {line[:200]}")
                    return
                with self._condition:
                    if response_id not in self._pending or self._pending[response_id] is not None:
                        # Unknown or duplicate id: correlation is broken.
                        self._reader_error = f"uncorrelated response id {response_id}"
                        self._condition.notify_all()
                        return
                    self._pending[response_id] = response
                    self._condition.notify_all()
            self._fail_all("bridge closed its output stream")
        except Exception as exc:
            self._fail_all(str(exc))

    def _fail_all(self, message: str) -> None:
        with self._condition:
            self._reader_error = message
            self._condition.notify_all()

    def _roundtrip(self, payload: dict) -> dict:
        request_id = next(self._ids)
        payload = dict(payload)
        payload["id"] = request_id
        line = json.dumps(payload, ensure_ascii=False) + "\n"
        with self._condition:
            if self._reader_error is not None:
                raise OracleError(self._reader_error)
            self._pending[request_id] = None
        try:
            self._proc.stdin.write(line)
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            with self._condition:
                self._pending.pop(request_id, None)
            raise OracleError(f"cannot write to bridge: {exc}") from exc
        with self._condition:
            ok = self._condition.wait_for(
                lambda: self._pending.get(request_id) is not None or self._reader_error is not None,
                timeout=self.timeout,
            )
            response = self._pending.pop(request_id, None)
            if response is not None:
                return response
            if self._reader_error is not None:
                raise OracleError(self._reader_error)
            if not ok:
                raise OracleError(f"bridge timeout after {self.timeout}s")
            raise OracleError("bridge response missing")

    def close(self) -> None:
        try:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=10)
        except Exception:
            self._proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


class HttpOracleClient(_ProtocolClient):
    """Protocol client POSTing each request to a single endpoint."""

    def __init__(self, endpoint: str, timeout: float = 120.0):
        self.endpoint = endpoint
        self.timeout = timeout
        self._ids = itertools.count(1)

    def _roundtrip(self, payload: dict) -> dict:
        request_id = next(self._ids)
        payload = dict(payload)
        payload["id"] = request_id
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as reply:
                response = json.loads(reply.read().decode("utf-8"))
        except (OSError, ValueError) as exc:
            raise OracleError(f"http bridge failure: {exc}") from exc
        if response.get("id") != request_id:
            raise OracleError(
                f"response id {response.get('id')} does not match request id {request_id}"
            )
        return response
