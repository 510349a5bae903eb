"""Service entry point."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .config import load_config


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="srkit-server", description="Run the review service.")
    ap.add_argument("--config", help="TOML configuration file")
    ap.add_argument("--host", help="listen address")
    ap.add_argument("--port", type=int, help="listen port")
    ap.add_argument("--data-dir", help="journal directory (omit for in-memory)")
    ap.add_argument("--static-dir", help="built web assets to serve at /")
    args = ap.parse_args(argv)

    cfg = load_config(args.config)
    if args.host is not None:
        cfg.host = args.host
    if args.port is not None:
        cfg.port = args.port
    if args.data_dir is not None:
        cfg.data_dir = args.data_dir
    if args.static_dir is not None:
        cfg.static_dir = args.static_dir

    uvicorn.run(create_app(config=cfg), host=cfg.host, port=cfg.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
