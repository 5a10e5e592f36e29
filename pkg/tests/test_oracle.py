import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from defnli.oracle import (
    BLANK,
    FillCandidate,
    HttpOracleClient,
    OracleError,
    ScriptedOracle,
    StdioOracleClient,
    handle_request,
    order_candidates,
)

from conftest import TABLE1_HYPOTHESIS, TABLE1_PREMISE, table1_script


@pytest.fixture
def mock():
    return ScriptedOracle(table1_script())


BLANKED = "A young man sits, looking out of a [BLANK] window. " + TABLE1_HYPOTHESIS


def test_fill_orders_by_probability(mock):
    tokens = [c.token for c in mock.fill(BLANKED, 50)]
    assert tokens == ["side", "train", "small"]


def test_fill_top_k_zero(mock):
    assert mock.fill(BLANKED, 0) == []


def test_fill_equal_probabilities_tie_lexicographic():
    oracle = ScriptedOracle(
        {"vocab": ["cat", "dog"], "fill": [{"text": f"a {BLANK}.", "candidates": {"dog": 0.1, "cat": 0.1}}]}
    )
    assert [c.token for c in oracle.fill(f"a {BLANK}.", 50)] == ["cat", "dog"]


def test_fill_requires_exactly_one_blank(mock):
    with pytest.raises(ValueError):
        mock.fill("no blank here.", 5)
    with pytest.raises(ValueError):
        mock.fill(f"{BLANK} and {BLANK}.", 5)


def test_classify_scripted_rows(mock):
    original = mock.classify(TABLE1_PREMISE, TABLE1_HYPOTHESIS)
    assert original.argmax() == "contradiction"
    spliced = mock.classify(
        "A young man sits, looking out of a side window.", TABLE1_HYPOTHESIS
    )
    assert spliced.argmax() == "neutral"


def test_classify_unscripted_is_uniform(mock):
    distribution = mock.classify("unknown premise.", "unknown hypothesis.")
    assert distribution.probs == {label: pytest.approx(1 / 3) for label in distribution.probs}


def test_tokenize_vocab_single_piece(mock):
    assert mock.tokenize("train") == ["train"]


def test_tokenize_unknown_word_splits_per_character(mock):
    assert mock.tokenize("yfcqudqqg") == list("yfcqudqqg")


def test_tokenize_empty_string_is_error(mock):
    with pytest.raises(ValueError):
        mock.tokenize("")


def test_explicit_pieces_override():
    oracle = ScriptedOracle({"pieces": {"fountain": ["fount", "ain"]}})
    assert oracle.tokenize("fountain") == ["fount", "ain"]


def test_mock_is_pure():
    first = ScriptedOracle(table1_script())
    second = ScriptedOracle(table1_script())
    assert [c.token for c in first.fill(BLANKED, 50)] == [
        c.token for c in second.fill(BLANKED, 50)
    ]
    assert first.classify(TABLE1_PREMISE, TABLE1_HYPOTHESIS).probs == second.classify(
        TABLE1_PREMISE, TABLE1_HYPOTHESIS
    ).probs


def test_order_candidates_stable():
    ordered = order_candidates(
        [FillCandidate("b", 0.2, 1), FillCandidate("a", 0.2, 1), FillCandidate("c", 0.5, 1)]
    )
    assert [c.token for c in ordered] == ["c", "a", "b"]


def test_fill_candidates_annotated_with_pieces(mock):
    pieces = {c.token: c.pieces for c in mock.fill(BLANKED, 50)}
    assert pieces == {"side": 1, "train": 1, "small": 1}


# --- wire protocol ---


def _write_script(tmp_path, script):
    path = tmp_path / "script.json"
    path.write_text(json.dumps(script), encoding="utf-8")
    return path


def _stdio_client(tmp_path, script, **kwargs):
    path = _write_script(tmp_path, script)
    return StdioOracleClient(
        [sys.executable, "-m", "defnli.mock_server", str(path)], **kwargs
    )


def test_stdio_round_trip(tmp_path):
    with _stdio_client(tmp_path, table1_script(), timeout=30) as client:
        tokens = [c.token for c in client.fill(BLANKED, 50)]
        assert tokens == ["side", "train", "small"]
        assert client.classify(TABLE1_PREMISE, TABLE1_HYPOTHESIS).argmax() == "contradiction"
        assert client.tokenize("train") == ["train"]
        assert client.tag(["train", "window"]) == ["NOUN", "NOUN"]


def test_stdio_in_band_error(tmp_path):
    # Empty premise violates the classify precondition server-side; the error
    # comes back in-band and is not retried.
    with _stdio_client(tmp_path, {}, timeout=30) as client:
        with pytest.raises(OracleError, match="bridge error"):
            client.classify("", "x.")


OUT_OF_ORDER_BRIDGE = r"""
import json, sys
pending = []
for line in sys.stdin:
    request = json.loads(line)
    pending.append(request)
    if len(pending) == 2:
        for req in reversed(pending):
            sys.stdout.write(json.dumps({"id": req["id"], "pieces": [req["text"]]}) + "\n")
        sys.stdout.flush()
        pending = []
"""


def test_stdio_out_of_order_responses():
    client = StdioOracleClient([sys.executable, "-c", OUT_OF_ORDER_BRIDGE], timeout=30)
    try:
        results = {}
        errors = []

        def work(word):
            try:
                results[word] = client.tokenize(word)
            except OracleError as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=work, args=(w,)) for w in ("alpha", "beta")]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        assert results == {"alpha": ["alpha"], "beta": ["beta"]}
    finally:
        client.close()


DUPLICATE_ID_BRIDGE = r"""
import json, sys
for line in sys.stdin:
    request = json.loads(line)
    response = json.dumps({"id": request["id"], "pieces": ["x"]})
    sys.stdout.write(response + "\n")
    sys.stdout.write(response + "\n")
    sys.stdout.flush()
"""


def test_stdio_duplicate_response_id_is_protocol_error():
    client = StdioOracleClient([sys.executable, "-c", DUPLICATE_ID_BRIDGE], timeout=5)
    try:
        client.tokenize("x")  # first call may succeed before the duplicate lands
        with pytest.raises(OracleError):
            client.tokenize("y")
    finally:
        client.close()


FLAKY_BRIDGE = r"""
import json, sys
seen = 0
for line in sys.stdin:
    request = json.loads(line)
    seen += 1
    if seen % 2 == 1:
        continue  # swallow every odd request; client must retry
    sys.stdout.write(json.dumps({"id": request["id"], "pieces": ["ok"]}) + "\n")
    sys.stdout.flush()
"""


def test_stdio_retries_once_after_timeout():
    client = StdioOracleClient([sys.executable, "-c", FLAKY_BRIDGE], timeout=2)
    try:
        assert client.tokenize("word") == ["ok"]
    finally:
        client.close()


def test_stdio_dead_bridge_raises():
    client = StdioOracleClient([sys.executable, "-c", "pass"], timeout=5)
    try:
        with pytest.raises(OracleError):
            client.tokenize("x")
    finally:
        client.close()


def test_malformed_distribution_rejected(tmp_path):
    bridge = r"""
import json, sys
for line in sys.stdin:
    request = json.loads(line)
    sys.stdout.write(json.dumps({"id": request["id"], "probs": {"entailment": 0.9, "neutral": 0.9, "contradiction": 0.1}}) + "\n")
    sys.stdout.flush()
"""
    client = StdioOracleClient([sys.executable, "-c", bridge], timeout=5)
    try:
        with pytest.raises(OracleError, match="sum"):
            client.classify("a.", "b.")
    finally:
        client.close()


class _Handler(BaseHTTPRequestHandler):
    oracle = None

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        request = json.loads(self.rfile.read(length))
        response = handle_request(self.oracle, request)
        payload = json.dumps(response).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def http_endpoint():
    _Handler.oracle = ScriptedOracle(table1_script())
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/"
    server.shutdown()


def test_http_round_trip(http_endpoint):
    client = HttpOracleClient(http_endpoint, timeout=10)
    assert [c.token for c in client.fill(BLANKED, 50)] == ["side", "train", "small"]
    assert client.classify(TABLE1_PREMISE, TABLE1_HYPOTHESIS).argmax() == "contradiction"
    assert client.tokenize("side") == ["side"]
    assert client.tag(["side"]) == ["NOUN"]


def test_http_unreachable_raises():
    client = HttpOracleClient("http://127.0.0.1:1/", timeout=2)
    with pytest.raises(OracleError):
        client.tokenize("x")
