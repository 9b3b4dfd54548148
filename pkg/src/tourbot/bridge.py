"""Service-call / publish-subscribe wire protocol and its in-process router.

Frames are single-line UTF-8 JSON objects with an ``op`` discriminator,
exchanged over WebSocket text frames (one object per frame). The router keeps
the service registry and topic subscriptions; services may be registered
in-process (the normal case: the simulated robot and the tour engine live in
the same process) or advertised by a connected session, in which case calls
are forwarded to that session and the response is routed back by id.

Concurrency contract: registry mutations are serialized on one internal lock,
handlers may run concurrently (a thread pool is optional), and frames destined
for one session are delivered in the order the router emitted them. A session
whose outbound queue exceeds ``MAX_QUEUE`` frames is disconnected so that pose
streaming can never stall the simulator tick.
"""

from __future__ import annotations

import itertools
import json
import threading
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Any, Callable, Optional

from .errors import NotFoundError, ProtocolError, TourbotError

MAX_QUEUE = 1024

# Field subsets per op: everything op-relevant is listed, everything else is
# rejected on encode and ignored on decode.
_OP_REQUIRED = {
    "advertise_service": ("service",),
    "call_service": ("id", "service"),
    "service_response": ("id", "service", "result"),
    "subscribe": ("topic",),
    "unsubscribe": ("topic",),
    "publish": ("topic",),
    "status": (),
}
_OP_OPTIONAL = {
    "advertise_service": (),
    "call_service": ("args",),
    "service_response": ("values",),
    "subscribe": (),
    "unsubscribe": (),
    "publish": ("msg",),
    "status": ("id", "msg"),
}
OPS = tuple(_OP_REQUIRED)

_FIELD_ORDER = ("op", "id", "service", "topic", "args", "values", "msg", "result")
_STRING_FIELDS = ("id", "service", "topic")


@dataclass(frozen=True)
class BridgeMessage:
    """One protocol frame. Fields irrelevant to ``op`` stay ``None``."""

    op: str
    id: Optional[str] = None
    service: Optional[str] = None
    topic: Optional[str] = None
    args: Any = None
    values: Any = None
    msg: Any = None
    result: Optional[bool] = None

    def validate(self) -> None:
        if self.op not in _OP_REQUIRED:
            raise ProtocolError(f"unknown op {self.op!r}")
        allowed = set(_OP_REQUIRED[self.op]) | set(_OP_OPTIONAL[self.op])
        for name in _FIELD_ORDER[1:]:
            value = getattr(self, name)
            if name in _OP_REQUIRED[self.op]:
                if value is None:
                    raise ProtocolError(f"{self.op} frame missing field {name!r}")
            elif value is not None and name not in allowed:
                raise ProtocolError(f"field {name!r} is not valid for op {self.op!r}")
        for name in _STRING_FIELDS:
            value = getattr(self, name)
            if value is not None and (not isinstance(value, str) or not value):
                raise ProtocolError(f"field {name!r} must be a non-empty string")
        if self.result is not None and not isinstance(self.result, bool):
            raise ProtocolError("field 'result' must be a boolean")


def encode(message: BridgeMessage) -> str:
    """Serialize a valid message to one compact JSON line."""
    message.validate()
    frame = {"op": message.op}
    for name in _FIELD_ORDER[1:]:
        value = getattr(message, name)
        if value is not None:
            frame[name] = value
    return json.dumps(frame, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def decode(frame: str) -> BridgeMessage:
    """Parse one frame, enforcing the op shape; unknown extra fields are ignored."""
    try:
        data = json.loads(frame)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed JSON frame: {exc}") from exc
    if not isinstance(data, dict):
        raise ProtocolError("frame must be a JSON object")
    if "op" not in data or data["op"] is None:
        raise ProtocolError("frame missing field 'op'")
    op = data["op"]
    if not isinstance(op, str) or op not in _OP_REQUIRED:
        raise ProtocolError(f"unknown op {op!r}")
    fields: dict[str, Any] = {}
    for name in _OP_REQUIRED[op]:
        if data.get(name) is None:
            raise ProtocolError(f"{op} frame missing field {name!r}")
        fields[name] = data[name]
    for name in _OP_OPTIONAL[op]:
        if name in data:
            fields[name] = data[name]
    message = BridgeMessage(op=op, **fields)
    message.validate()
    return message


class Session:
    """One attached peer. Subclasses define how frames reach the wire."""

    _counter = itertools.count(1)

    def __init__(self, name: str = ""):
        self.session_id = name or f"session-{next(Session._counter)}"
        self.closed = False

    def deliver(self, frame: str) -> bool:
        """Queue a frame for the peer; False refuses it (dead or overflowing)."""
        raise NotImplementedError

    def close(self) -> None:
        self.closed = True


class LocalSession(Session):
    """In-process session that collects frames in a list (tests, CLI, loopback)."""

    def __init__(self, name: str = "", max_queue: int = MAX_QUEUE):
        super().__init__(name)
        self.max_queue = max_queue
        self.frames: list[str] = []

    def deliver(self, frame: str) -> bool:
        if self.closed or len(self.frames) >= self.max_queue:
            return False
        self.frames.append(frame)
        return True

    def messages(self) -> list[BridgeMessage]:
        return [decode(f) for f in self.frames]


class _PendingCall:
    """Bookkeeping for a call forwarded to a remote provider session."""

    def __init__(self, service: str, caller: Optional[Session], caller_id: Optional[str]):
        self.service = service
        self.caller = caller
        self.caller_id = caller_id
        self.event = threading.Event() if caller is None else None
        self.response: Optional[BridgeMessage] = None


ServiceHandler = Callable[[Any], Any]


class Router:
    """Service registry plus topic fan-out shared by every component."""

    def __init__(self, handler_pool: Optional[Executor] = None):
        self._lock = threading.RLock()
        self._pool = handler_pool
        self._services: dict[str, ServiceHandler] = {}
        self._remote_services: dict[str, Session] = {}
        self._subscribers: dict[str, list[Session]] = {}
        self._sessions: set[Session] = set()
        self._pending: dict[str, _PendingCall] = {}
        self._forward_ids = itertools.count(1)

    # -- registry -----------------------------------------------------------

    def advertise(self, service: str, handler: ServiceHandler) -> None:
        with self._lock:
            if service in self._services or service in self._remote_services:
                raise TourbotError(f"service {service!r} already advertised")
            self._services[service] = handler

    def unadvertise(self, service: str) -> None:
        with self._lock:
            self._services.pop(service, None)
            self._remote_services.pop(service, None)

    def services(self) -> list[str]:
        with self._lock:
            return sorted(set(self._services) | set(self._remote_services))

    def attach_session(self, session: Session) -> None:
        with self._lock:
            self._sessions.add(session)

    def detach_session(self, session: Session) -> None:
        with self._lock:
            self._sessions.discard(session)
            for sessions in self._subscribers.values():
                if session in sessions:
                    sessions.remove(session)
            dead = [s for s, owner in self._remote_services.items() if owner is session]
            for service in dead:
                del self._remote_services[service]
            orphaned = [
                fid
                for fid, pending in self._pending.items()
                if pending.service in dead or pending.caller is session
            ]
            failures = []
            for fid in orphaned:
                pending = self._pending.pop(fid)
                if pending.caller is not session:
                    failures.append((fid, pending))
        for fid, pending in failures:
            self._finish_pending(
                pending,
                BridgeMessage(
                    op="service_response",
                    id=fid,
                    service=pending.service,
                    result=False,
                    values={"code": "internal", "message": "service provider disconnected"},
                ),
            )

    def subscribe(self, session: Session, topic: str) -> None:
        with self._lock:
            self._sessions.add(session)
            sessions = self._subscribers.setdefault(topic, [])
            if session not in sessions:
                sessions.append(session)

    def unsubscribe(self, session: Session, topic: str) -> None:
        with self._lock:
            sessions = self._subscribers.get(topic, [])
            if session in sessions:
                sessions.remove(session)

    # -- topic fan-out ------------------------------------------------------

    def publish(self, topic: str, msg: Any) -> int:
        """Deliver ``msg`` to every subscriber of ``topic``; returns the count."""
        frame = encode(BridgeMessage(op="publish", topic=topic, msg=msg))
        delivered = 0
        with self._lock:
            for session in list(self._subscribers.get(topic, [])):
                if self._emit(session, frame):
                    delivered += 1
        return delivered

    # -- service calls ------------------------------------------------------

    def call_local(self, service: str, args: Any = None, timeout: float = 10.0) -> Any:
        """Call a service from in-process code; raises typed errors on failure."""
        with self._lock:
            handler = self._services.get(service)
            provider = self._remote_services.get(service)
        if handler is not None:
            return handler(args)
        if provider is None:
            raise NotFoundError(f"no such service: {service}")
        pending = _PendingCall(service, caller=None, caller_id=None)
        fid = f"fwd-{next(self._forward_ids)}"
        with self._lock:
            self._pending[fid] = pending
            self._emit(
                provider,
                encode(BridgeMessage(op="call_service", id=fid, service=service, args=args)),
            )
        if not pending.event.wait(timeout):
            with self._lock:
                self._pending.pop(fid, None)
            raise TourbotError(f"service call to {service!r} timed out")
        response = pending.response
        if response.result:
            return response.values
        from .errors import error_from_payload

        raise error_from_payload(response.values)

    def handle_frame(self, session: Session, frame: str) -> None:
        """Process one inbound frame; protocol errors go back as status frames."""
        self.attach_session(session)
        try:
            message = decode(frame)
        except ProtocolError as exc:
            self._status(session, f"error: {exc.message}")
            return
        op = message.op
        if op == "subscribe":
            self.subscribe(session, message.topic)
        elif op == "unsubscribe":
            self.unsubscribe(session, message.topic)
        elif op == "publish":
            self.publish(message.topic, message.msg)
        elif op == "advertise_service":
            self._advertise_remote(session, message.service)
        elif op == "call_service":
            self._dispatch_call(session, message)
        elif op == "service_response":
            self._resolve_forward(session, message)
        # inbound status frames are informational only

    # -- internals ----------------------------------------------------------

    def _emit(self, session: Session, frame: str) -> bool:
        ok = session.deliver(frame)
        if not ok:
            self.detach_session(session)
            session.close()
        return ok

    def _status(self, session: Session, text: str) -> None:
        with self._lock:
            self._emit(session, encode(BridgeMessage(op="status", msg=text)))

    def _advertise_remote(self, session: Session, service: str) -> None:
        with self._lock:
            owner = self._remote_services.get(service)
            if service in self._services or (owner is not None and owner is not session):
                self._status(session, f"error: service {service!r} already advertised")
                return
            self._remote_services[service] = session

    def _dispatch_call(self, session: Session, message: BridgeMessage) -> None:
        with self._lock:
            handler = self._services.get(message.service)
            provider = self._remote_services.get(message.service)
        if handler is not None:
            if self._pool is not None:
                self._pool.submit(self._run_handler, session, message, handler)
            else:
                self._run_handler(session, message, handler)
            return
        if provider is not None and provider is not session:
            pending = _PendingCall(message.service, caller=session, caller_id=message.id)
            fid = f"fwd-{next(self._forward_ids)}"
            with self._lock:
                self._pending[fid] = pending
                self._emit(
                    provider,
                    encode(
                        BridgeMessage(
                            op="call_service", id=fid, service=message.service, args=message.args
                        )
                    ),
                )
            return
        self._respond(
            session,
            message,
            result=False,
            values={"code": "not_found", "message": "no such service"},
        )

    def _run_handler(self, session: Session, message: BridgeMessage, handler: ServiceHandler) -> None:
        try:
            values = handler(message.args)
            result = True
        except TourbotError as exc:
            values = exc.to_payload()
            result = False
        except Exception as exc:  # handler bug: report, never kill the router
            values = {"code": "internal", "message": f"{type(exc).__name__}: {exc}"}
            result = False
        self._respond(session, message, result=result, values=values)

    def _respond(self, session: Session, call: BridgeMessage, result: bool, values: Any) -> None:
        response = BridgeMessage(
            op="service_response",
            id=call.id,
            service=call.service,
            result=result,
            values=values,
        )
        with self._lock:
            self._emit(session, encode(response))

    def _resolve_forward(self, session: Session, message: BridgeMessage) -> None:
        with self._lock:
            pending = self._pending.pop(message.id, None)
        if pending is None:
            self._status(session, f"error: unexpected service_response id {message.id!r}")
            return
        self._finish_pending(pending, message)

    def _finish_pending(self, pending: _PendingCall, message: BridgeMessage) -> None:
        if pending.caller is None:
            pending.response = message
            pending.event.set()
            return
        response = BridgeMessage(
            op="service_response",
            id=pending.caller_id,
            service=pending.service,
            result=bool(message.result),
            values=message.values,
        )
        with self._lock:
            self._emit(pending.caller, encode(response))
