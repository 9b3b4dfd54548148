"""HTTP + WebSocket front door for the operator console.

Every REST endpoint is a thin adapter over one bridge service call: the
response body is exactly the service result. Live data (robot pose, tour
progress) flows over the /api/events WebSocket as {"topic", "msg"} frames.
A second, plain WebSocket app exposes the raw bridge protocol on /bridge.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .bridge import MAX_QUEUE, Session, decode
from .errors import TourbotError, ValidationError
from .world import World

EVENT_TOPICS = ("/robot/pose", "/tour/progress")


class QueueSession(Session):
    """Bridge session whose frames drain through an asyncio queue.

    deliver() is called from worker/tick threads; the frame hops onto the
    session's event loop. A slow consumer trips the bridge backpressure rule
    and gets detached by the router.
    """

    def __init__(self, loop: asyncio.AbstractEventLoop, name: Optional[str] = None):
        super().__init__(name)
        self._loop = loop
        self.queue: asyncio.Queue = asyncio.Queue()

    def deliver(self, frame: str) -> bool:
        if self.queue.qsize() >= MAX_QUEUE:
            return False
        self._loop.call_soon_threadsafe(self.queue.put_nowait, frame)
        return True

    def close(self) -> None:
        self._loop.call_soon_threadsafe(self.queue.put_nowait, None)


async def _pump(ws: WebSocket, session: QueueSession, wrap_events: bool) -> None:
    """Forward queued frames to the socket until the session closes."""
    while True:
        frame = await session.queue.get()
        if frame is None:
            break
        if wrap_events:
            message = decode(frame)
            if message.op != "publish":
                continue
            await ws.send_text(
                json.dumps({"topic": message.topic, "msg": message.msg}, ensure_ascii=False)
            )
        else:
            await ws.send_text(frame)
    try:
        await ws.close()
    except Exception:
        pass  # already closed from the client side


def _json_body(raw: bytes) -> dict:
    if not raw:
        return {}
    try:
        body = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"request body is not valid JSON: {exc.msg}")
    if not isinstance(body, dict):
        raise ValidationError("request body must be a JSON object")
    return body


def create_app(world: World) -> FastAPI:
    """The console-facing HTTP app."""
    app = FastAPI(title="tourbot gateway", docs_url=None, redoc_url=None, openapi_url=None)
    if world.cfg.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(world.cfg.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    call = world.router.call_local

    @app.exception_handler(TourbotError)
    async def on_domain_error(request: Request, exc: TourbotError):
        return JSONResponse(status_code=exc.http_status, content=exc.to_payload())

    @app.exception_handler(RequestValidationError)
    async def on_request_error(request: Request, exc: RequestValidationError):
        payload = ValidationError("invalid request", detail=exc.errors()).to_payload()
        return JSONResponse(status_code=400, content=jsonable_encoder(payload))

    # Endpoints are sync defs: FastAPI runs them on worker threads, so taking
    # the world lock inside a handler never stalls the event loop.

    @app.get("/api/tours")
    def list_tours():
        return call("/tour/list")

    @app.post("/api/tours")
    async def create_tour(request: Request):
        return call("/tour/create", _json_body(await request.body()))

    @app.get("/api/tours/{tour_id}")
    def get_tour(tour_id: str):
        return call("/tour/get", {"id": tour_id})

    @app.patch("/api/tours/{tour_id}")
    async def edit_tour(tour_id: str, request: Request):
        return call("/tour/edit", {"id": tour_id, "patch": _json_body(await request.body())})

    @app.delete("/api/tours/{tour_id}")
    def delete_tour(tour_id: str):
        return call("/tour/delete", {"id": tour_id})

    @app.post("/api/tours/{tour_id}/copy")
    async def copy_tour(tour_id: str, request: Request):
        body = _json_body(await request.body())
        return call("/tour/copy", {"id": tour_id, "new_name": body.get("new_name")})

    @app.post("/api/tours/{tour_id}/execute")
    def execute_tour(tour_id: str):
        return call("/tour/execute", {"id": tour_id})

    @app.post("/api/execution/abort")
    def abort_execution():
        return call("/tour/abort", {})

    @app.get("/api/locations")
    def list_locations():
        return call("/location/list")

    @app.post("/api/locations")
    async def save_location(request: Request):
        return call("/location/save", _json_body(await request.body()))

    @app.patch("/api/locations/{location_id}")
    async def edit_location(location_id: str, request: Request):
        return call(
            "/location/edit", {"id": location_id, "patch": _json_body(await request.body())}
        )

    @app.delete("/api/locations/{location_id}")
    def delete_location(location_id: str):
        return call("/location/delete", {"id": location_id})

    @app.post("/api/robot/teleop")
    async def teleop(request: Request):
        return call("/motion/teleop", _json_body(await request.body()))

    @app.post("/api/robot/goto")
    async def goto(request: Request):
        return call("/motion/goto", _json_body(await request.body()))

    @app.get("/api/robot/status")
    def robot_status():
        return call("/robot/status")

    @app.get("/api/search")
    def search(q: str = ""):
        return call("/store/search", {"query": q})

    @app.get("/api/stats/monthly")
    def stats_monthly(months: Optional[int] = None):
        args: dict[str, Any] = {}
        if months is not None:
            args["window_months"] = months
        return call("/stats/monthly", args)

    @app.get("/api/stats/types")
    def stats_types(months: Optional[int] = None):
        args: dict[str, Any] = {}
        if months is not None:
            args["window_months"] = months
        return call("/stats/types", args)

    @app.get("/api/stats/tours/{tour_id}")
    def stats_tour(tour_id: str):
        return call("/stats/tour", {"id": tour_id})

    @app.get("/api/recommendations")
    def recommendations(
        type: Optional[str] = None,
        max_duration: Optional[int] = None,
        k: Optional[int] = None,
        months: Optional[int] = None,
    ):
        if type is None and max_duration is None and k is None and months is None:
            return call("/recommend/popular")
        args: dict[str, Any] = {"tour_type": type}
        if max_duration is not None:
            args["max_duration"] = max_duration
        if k is not None:
            args["top_k"] = k
        if months is not None:
            args["window_months"] = months
        return call("/recommend/custom", args)

    @app.websocket("/api/events")
    async def events(ws: WebSocket):
        # Subscribe before finishing the handshake: a client that connects and
        # immediately watches for events can never miss the first frame.
        session = QueueSession(asyncio.get_running_loop())
        world.router.attach_session(session)
        for topic in EVENT_TOPICS:
            world.router.subscribe(session, topic)
        await ws.accept()
        pump = asyncio.ensure_future(_pump(ws, session, wrap_events=True))
        try:
            while True:
                await ws.receive_text()  # inbound traffic is ignored
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            world.router.detach_session(session)
            session.close()
            await asyncio.wait_for(pump, timeout=5.0)

    static_dir = world.cfg.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app


def create_bridge_app(world: World) -> FastAPI:
    """The raw wire-protocol app: one JSON frame per WebSocket text message."""
    app = FastAPI(title="tourbot bridge", docs_url=None, redoc_url=None, openapi_url=None)

    @app.websocket("/bridge")
    async def bridge(ws: WebSocket):
        session = QueueSession(asyncio.get_running_loop())
        world.router.attach_session(session)
        await ws.accept()
        pump = asyncio.ensure_future(_pump(ws, session, wrap_events=False))
        try:
            while True:
                frame = await ws.receive_text()
                await asyncio.to_thread(world.router.handle_frame, session, frame)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            world.router.detach_session(session)
            session.close()
            await asyncio.wait_for(pump, timeout=5.0)

    return app
