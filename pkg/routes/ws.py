"""WebSocket handler: /ws/progress."""

from __future__ import annotations

import asyncio
import logging

from fastapi import APIRouter, WebSocket, WebSocketDisconnect

from config import MonitorConfig
from run_state import RunReader

logger = logging.getLogger(__name__)


def create_router(reader: RunReader, config: MonitorConfig):
    """Create the progress stream router.

    Pushes ``reader.status()`` on connect and again whenever the manifest
    grows, polling at ``config.progress_hz``.
    """
    router = APIRouter()

    @router.websocket("/ws/progress")
    async def ws_progress(ws: WebSocket):
        await ws.accept()
        interval = 1.0 / config.progress_hz
        last_size = -1
        try:
            while True:
                size = reader.manifest_size()
                if size != last_size:
                    await ws.send_json(reader.status())
                    last_size = size
                await asyncio.sleep(interval)
        except WebSocketDisconnect:
            pass
        except Exception:
            logger.exception("ws/progress error")

    return router
