"""Bridge entry point: python -m defnli_bridge --transport stdio|http [...]"""

from __future__ import annotations

import argparse
import sys

from .config import BridgeConfig
from .models import ModelOracle
from .server import serve_http, serve_stdio


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="defnli-bridge", description=__doc__)
    parser.add_argument("--transport", choices=("stdio", "http"), default="stdio")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8600)
    parser.add_argument("--fill-model", dest="fill_model_name")
    parser.add_argument("--classifier-model", dest="classifier_model_name")
    parser.add_argument("--pos-model", dest="pos_model_name")
    parser.add_argument("--device")
    parser.add_argument("--max-seq-len", dest="max_sequence_length", type=int)
    args = parser.parse_args(argv)

    config = BridgeConfig.from_env(
        fill_model_name=args.fill_model_name,
        classifier_model_name=args.classifier_model_name,
        pos_model_name=args.pos_model_name,
        device=args.device,
        max_sequence_length=args.max_sequence_length,
    )
    try:
        oracle = ModelOracle(config)
    except Exception as exc:
        print(f"bridge startup failed: {exc}", file=sys.stderr)
        return 1
    print(
        f"bridge ready: fill={config.fill_model_name} "
        f"classifier={config.classifier_model_name} device={config.device}",
        file=sys.stderr,
        flush=True,
    )
    if args.transport == "stdio":
        serve_stdio(oracle)
        return 0
    serve_http(oracle, args.host, args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
