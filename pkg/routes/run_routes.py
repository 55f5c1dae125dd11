"""GET /health, /runs/*, /logs endpoints."""

from __future__ import annotations

from fastapi import APIRouter, Query
from fastapi.responses import JSONResponse

from logging_config import LogBuffer
from run_state import RunReader


def create_router(reader: RunReader, log_buffer: LogBuffer, log_lines: int = 200):
    router = APIRouter()

    @router.get("/health")
    async def health():
        return {"status": "ok", "out_dir": reader.out_dir}

    @router.get("/runs/status")
    async def run_status():
        return reader.status()

    @router.get("/runs/results")
    async def run_results(limit: int = Query(0, ge=0)):
        """Rows of results.csv; ``limit`` > 0 keeps the last ``limit`` rows."""
        rows = reader.results()
        if rows is None:
            return JSONResponse({"error": "no results yet"}, status_code=404)
        return {"count": len(rows), "rows": rows[-limit:] if limit else rows}

    @router.get("/runs/summary")
    async def run_summary():
        summary = reader.summary()
        if summary is None:
            return JSONResponse({"error": "no summary yet"}, status_code=404)
        return summary

    @router.get("/runs/census")
    async def run_census():
        census = reader.census()
        if census is None:
            return JSONResponse({"error": "no census in this directory"}, status_code=404)
        return census

    @router.get("/logs")
    async def logs(lines: int = Query(log_lines, ge=0, le=10_000)):
        return {"lines": log_buffer.tail(lines)}

    return router
