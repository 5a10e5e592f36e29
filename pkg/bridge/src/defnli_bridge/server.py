"""Serve the oracle wire protocol over stdio or HTTP."""

from __future__ import annotations

import json
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .models import ModelOracle, RequestError


def answer(oracle: ModelOracle, request: dict) -> dict:
    request_id = request.get("id")
    try:
        op = request.get("op")
        if op == "fill":
            candidates = oracle.fill(request["text"], int(request.get("top_k", 50)))
            return {"id": request_id, "candidates": candidates}
        if op == "classify":
            return {"id": request_id, "probs": oracle.classify(request["premise"], request["hypothesis"])}
        if op == "tokenize":
            return {"id": request_id, "pieces": oracle.tokenize(request["text"])}
        if op == "tag":
            return {"id": request_id, "tags": oracle.tag(request["tokens"])}
        raise RequestError(f"unknown op {op!r}")
    except (RequestError, KeyError, TypeError, ValueError) as exc:
        return {"id": request_id, "error": str(exc)}


def serve_stdio(oracle: ModelOracle, in_stream=None, out_stream=None) -> None:
    in_stream = in_stream or sys.stdin
    out_stream = out_stream or sys.stdout
    for raw in in_stream:
        line = raw.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except ValueError:
            response = {"id": None, "error": "malformed request"}
        else:
            response = answer(oracle, request)
        out_stream.write(json.dumps(response, ensure_ascii=False) + "\n")
        out_stream.flush()


class _Handler(BaseHTTPRequestHandler):
    oracle: ModelOracle = None

    def do_POST(self):
        try:
            length = int(self.headers.get("Content-Length", "0"))
            request = json.loads(self.rfile.read(length))
        except ValueError:
            response = {"id": None, "error": "malformed request"}
        else:
            response = answer(self.oracle, request)
        payload = json.dumps(response, ensure_ascii=False).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):  # requests are not diagnostics
        pass


def serve_http(oracle: ModelOracle, host: str, port: int) -> None:
    handler = type("BoundHandler", (_Handler,), {"oracle": oracle})
    server = ThreadingHTTPServer((host, port), handler)
    print(f"listening on http://{host}:{server.server_address[1]}/", file=sys.stderr, flush=True)
    server.serve_forever()
