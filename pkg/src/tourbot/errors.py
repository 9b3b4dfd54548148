"""Error taxonomy shared by every layer.

Each error carries a stable machine-readable ``code`` drawn from the set the
HTTP gateway publishes (validation, conflict, not_found, busy, protocol,
internal) plus an optional structured ``detail`` payload for the UI.
"""

from __future__ import annotations

from typing import Any


class TourbotError(Exception):
    """Base class for all domain errors."""

    code = "internal"
    http_status = 500

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_payload(self) -> dict:
        payload: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.detail is not None:
            payload["detail"] = self.detail
        return payload


class ValidationError(TourbotError):
    code = "validation"
    http_status = 400


class ConflictError(TourbotError):
    code = "conflict"
    http_status = 409


class NotFoundError(TourbotError):
    code = "not_found"
    http_status = 404


class BusyError(TourbotError):
    code = "busy"
    http_status = 409


class ProtocolError(TourbotError):
    code = "protocol"
    http_status = 400


class StoreFormatError(ValidationError):
    """A tour file could not be parsed or failed schema validation."""


ERROR_CODES = ("validation", "conflict", "not_found", "busy", "protocol", "internal")


def error_from_payload(payload: Any) -> TourbotError:
    """Rebuild a typed error from a wire payload produced by ``to_payload``."""
    if not isinstance(payload, dict):
        return TourbotError("unknown error")
    code = payload.get("code", "internal")
    message = payload.get("message", "unknown error")
    detail = payload.get("detail")
    for cls in (ValidationError, ConflictError, NotFoundError, BusyError, ProtocolError):
        if cls.code == code:
            return cls(message, detail)
    return TourbotError(message, detail)
