"""Serve a scripted oracle over stdio: python -m defnli.mock_server script.json"""

from __future__ import annotations

import json
import sys

from .oracle import ScriptedOracle, serve_stdio


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m defnli.mock_server <script.json>", file=sys.stderr)
        return 1
    with open(argv[0], "r", encoding="utf-8") as fp:
        script = json.load(fp)
    serve_stdio(ScriptedOracle(script), sys.stdin, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
