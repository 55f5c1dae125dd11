"""Run monitor: read-only FastAPI app over an output directory."""

from __future__ import annotations

import argparse
import os
import sys

_SERVER_DIR = os.path.dirname(os.path.abspath(__file__))
if _SERVER_DIR not in sys.path:
    sys.path.insert(0, _SERVER_DIR)

import uvicorn
from fastapi import FastAPI

from config import MonitorConfig
from logging_config import get_log_buffer, setup_logging
from run_state import RunReader

logger = setup_logging("metastab.monitor")


def build_app(cfg: MonitorConfig) -> FastAPI:
    app = FastAPI(title="Contact Process Run Monitor")
    reader = RunReader(cfg.out)

    @app.get("/")
    async def root():
        return {"status": "ok", "message": "Contact process run monitor", "out_dir": cfg.out, "docs": "/docs"}

    # -- routes --------------------------------------------------------------
    from routes.run_routes import create_router as run_router
    from routes.ws import create_router as ws_router

    app.include_router(run_router(reader, get_log_buffer(), cfg.log_lines))
    app.include_router(ws_router(reader, cfg))

    # -- lifecycle -----------------------------------------------------------
    @app.on_event("startup")
    async def startup():
        logger.info("Monitoring %s on %s:%d", cfg.out, cfg.host, cfg.port)

    @app.on_event("shutdown")
    async def shutdown():
        logger.info("Shutting down run monitor")

    return app


def serve(cfg: MonitorConfig) -> None:
    app = build_app(cfg)
    uvicorn.run(app, host=cfg.host, port=cfg.port, access_log=False)


def main():
    defaults = MonitorConfig()
    parser = argparse.ArgumentParser(description="Contact process run monitor")
    parser.add_argument("--host", default=defaults.host)
    parser.add_argument("--port", type=int, default=defaults.port)
    parser.add_argument("--out", default=defaults.out, help="Run output directory to watch")
    parser.add_argument("--progress-hz", type=float, default=defaults.progress_hz,
                        help="Poll rate of the /ws/progress stream")
    args = parser.parse_args()
    serve(MonitorConfig(host=args.host, port=args.port, out=args.out, progress_hz=args.progress_hz))


if __name__ == "__main__":
    main()
