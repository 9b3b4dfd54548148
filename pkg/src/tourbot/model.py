"""Shared domain types: poses, locations, tours, run records, robot status.

Conventions used across the whole system:

- identifiers are random 128-bit values rendered as 32 lowercase hex chars,
- timestamps are timezone-aware UTC truncated to whole seconds,
- headings are radians normalized to the half-open interval (-pi, pi].
"""

from __future__ import annotations

import math
import secrets
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Any, Optional

from .errors import ValidationError

MAX_DESCRIPTION_LEN = 10_000

RUN_OUTCOMES = ("completed", "aborted", "failed")


def new_id() -> str:
    """Return a fresh 128-bit identifier as lowercase hex text."""
    return secrets.token_hex(16)


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi], preserving it modulo 2*pi."""
    if not math.isfinite(theta):
        raise ValidationError(f"angle must be finite, got {theta!r}")
    a = math.fmod(theta, math.tau)
    if a > math.pi:
        a -= math.tau
    elif a <= -math.pi:
        a += math.tau
    return a


def utcnow() -> datetime:
    """Current UTC time at second precision."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def to_timestamp(dt: datetime) -> str:
    """Render a UTC datetime as ``YYYY-MM-DDTHH:MM:SSZ``."""
    if dt.tzinfo is None:
        raise ValidationError("timestamps must be timezone-aware")
    dt = dt.astimezone(timezone.utc).replace(microsecond=0)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(text: Any) -> datetime:
    """Parse ``YYYY-MM-DDTHH:MM:SSZ`` (or an explicit UTC offset) to a datetime."""
    if not isinstance(text, str):
        raise ValidationError(f"timestamp must be a string, got {type(text).__name__}")
    raw = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise ValidationError(f"bad timestamp {text!r}: {exc}") from exc
    if dt.tzinfo is None:
        raise ValidationError(f"timestamp {text!r} lacks a UTC offset")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


class WallClock:
    """Real UTC wall clock, second precision."""

    def now(self) -> datetime:
        return utcnow()


class SimClock:
    """Simulated clock that advances only when told to.

    Starts at ``base`` (defaults to the current wall time) and accumulates
    fractional seconds; ``now()`` truncates to whole seconds so records carry
    the same precision as the wall clock.
    """

    def __init__(self, base: Optional[datetime] = None):
        self.base = (base or utcnow()).astimezone(timezone.utc)
        self.elapsed = 0.0

    def advance(self, seconds: float) -> None:
        if seconds < 0:
            raise ValidationError("clock cannot run backwards")
        self.elapsed += seconds

    def now(self) -> datetime:
        return (self.base + timedelta(seconds=self.elapsed)).replace(microsecond=0)


class RobotMode(str, Enum):
    IDLE = "idle"
    NAVIGATING = "navigating"
    SPEAKING = "speaking"


@dataclass(frozen=True)
class Pose2D:
    """Planar robot pose. ``theta`` is normalized on construction."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ("x", "y"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValidationError(f"pose {name} must be a number")
            if not math.isfinite(value):
                raise ValidationError(f"pose {name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not isinstance(self.theta, (int, float)) or isinstance(self.theta, bool):
            raise ValidationError("pose theta must be a number")
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    def distance_to(self, other: "Pose2D") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "theta": self.theta}

    @classmethod
    def from_json(cls, data: Any) -> "Pose2D":
        if not isinstance(data, dict):
            raise ValidationError("pose must be an object with x, y, theta")
        missing = [k for k in ("x", "y", "theta") if k not in data]
        if missing:
            raise ValidationError(f"pose missing field {missing[0]!r}")
        return cls(x=data["x"], y=data["y"], theta=data["theta"])


@dataclass(frozen=True)
class Location:
    """A named, saved robot pose with the speech text attached to it."""

    id: str
    name: str
    pose: Pose2D
    description: str
    created_at: datetime

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.strip():
            raise ValidationError("location name must be a non-empty string")
        if not isinstance(self.description, str):
            raise ValidationError("location description must be a string")
        if len(self.description) > MAX_DESCRIPTION_LEN:
            raise ValidationError(
                f"location description exceeds {MAX_DESCRIPTION_LEN} characters"
            )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "pose": self.pose.to_json(),
            "description": self.description,
            "created_at": to_timestamp(self.created_at),
        }

    @classmethod
    def from_json(cls, data: Any) -> "Location":
        _require_object(data, "location")
        return cls(
            id=_require_str(data, "id", "location"),
            name=_require_str(data, "name", "location"),
            pose=Pose2D.from_json(data.get("pose")),
            description=_require_str(data, "description", "location", allow_empty=True),
            created_at=parse_timestamp(data.get("created_at")),
        )


@dataclass(frozen=True)
class TourStop:
    """One tour stop: a location reference plus an optional speech override."""

    location_id: str
    speech_override: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.location_id, str) or not self.location_id:
            raise ValidationError("stop location_id must be a non-empty string")
        if self.speech_override is not None and not isinstance(self.speech_override, str):
            raise ValidationError("stop speech_override must be a string or null")

    def to_json(self) -> dict:
        return {"location_id": self.location_id, "speech_override": self.speech_override}

    @classmethod
    def from_json(cls, data: Any) -> "TourStop":
        _require_object(data, "stop")
        if "location_id" not in data:
            raise ValidationError("stop missing field 'location_id'")
        return cls(
            location_id=data["location_id"],
            speech_override=data.get("speech_override"),
        )


@dataclass(frozen=True)
class Tour:
    """An ordered list of stops plus the metadata operators edit."""

    id: str
    name: str
    tour_type: str
    stops: tuple[TourStop, ...]
    expected_duration: int
    created_at: datetime
    updated_at: datetime

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.strip():
            raise ValidationError("tour name must be a non-empty string")
        if not isinstance(self.tour_type, str):
            raise ValidationError("tour_type must be a string")
        object.__setattr__(self, "stops", tuple(self.stops))
        if not isinstance(self.expected_duration, int) or isinstance(self.expected_duration, bool):
            raise ValidationError("expected_duration must be an integer number of minutes")
        if self.expected_duration <= 0:
            raise ValidationError("expected_duration must be positive")
        if self.updated_at < self.created_at:
            raise ValidationError("tour updated_at precedes created_at")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "tour_type": self.tour_type,
            "stops": [s.to_json() for s in self.stops],
            "expected_duration": self.expected_duration,
            "created_at": to_timestamp(self.created_at),
            "updated_at": to_timestamp(self.updated_at),
        }

    @classmethod
    def from_json(cls, data: Any) -> "Tour":
        _require_object(data, "tour")
        stops = data.get("stops")
        if not isinstance(stops, list):
            raise ValidationError("tour stops must be a list")
        return cls(
            id=_require_str(data, "id", "tour"),
            name=_require_str(data, "name", "tour"),
            tour_type=_require_str(data, "tour_type", "tour", allow_empty=True),
            stops=tuple(TourStop.from_json(s) for s in stops),
            expected_duration=data.get("expected_duration"),
            created_at=parse_timestamp(data.get("created_at")),
            updated_at=parse_timestamp(data.get("updated_at")),
        )


@dataclass(frozen=True)
class TourRun:
    """One execution record of a tour; the unit the analytics consume."""

    run_id: str
    tour_id: str
    started_at: datetime
    ended_at: datetime
    outcome: str
    stops_visited: int

    def __post_init__(self):
        if self.outcome not in RUN_OUTCOMES:
            raise ValidationError(f"run outcome must be one of {RUN_OUTCOMES}")
        if self.ended_at < self.started_at:
            raise ValidationError("run ended_at precedes started_at")
        if not isinstance(self.stops_visited, int) or isinstance(self.stops_visited, bool):
            raise ValidationError("stops_visited must be an integer")
        if self.stops_visited < 0:
            raise ValidationError("stops_visited must be non-negative")

    @property
    def duration_seconds(self) -> float:
        return (self.ended_at - self.started_at).total_seconds()

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "tour_id": self.tour_id,
            "started_at": to_timestamp(self.started_at),
            "ended_at": to_timestamp(self.ended_at),
            "outcome": self.outcome,
            "stops_visited": self.stops_visited,
        }

    @classmethod
    def from_json(cls, data: Any) -> "TourRun":
        _require_object(data, "run")
        return cls(
            run_id=_require_str(data, "run_id", "run"),
            tour_id=_require_str(data, "tour_id", "run"),
            started_at=parse_timestamp(data.get("started_at")),
            ended_at=parse_timestamp(data.get("ended_at")),
            outcome=data.get("outcome"),
            stops_visited=data.get("stops_visited"),
        )


@dataclass(frozen=True)
class RobotStatus:
    """Snapshot of the robot: pose, activity mode, navigation goal, active tour."""

    pose: Pose2D = field(default_factory=lambda: Pose2D(0.0, 0.0, 0.0))
    mode: RobotMode = RobotMode.IDLE
    goal: Optional[Pose2D] = None
    active_tour: Optional[str] = None

    def __post_init__(self):
        if self.mode == RobotMode.NAVIGATING and self.goal is None:
            raise ValidationError("navigating robot must have a goal")
        if self.mode != RobotMode.NAVIGATING and self.goal is not None:
            raise ValidationError(f"{self.mode.value} robot must not have a goal")

    def with_(self, **changes) -> "RobotStatus":
        return replace(self, **changes)

    def to_json(self) -> dict:
        return {
            "pose": self.pose.to_json(),
            "mode": self.mode.value,
            "goal": self.goal.to_json() if self.goal else None,
            "active_tour": self.active_tour,
        }


def _require_object(data: Any, what: str) -> None:
    if not isinstance(data, dict):
        raise ValidationError(f"{what} must be a JSON object")


def _require_str(data: dict, key: str, what: str, allow_empty: bool = False) -> str:
    if key not in data:
        raise ValidationError(f"{what} missing field {key!r}")
    value = data[key]
    if not isinstance(value, str) or (not allow_empty and not value):
        raise ValidationError(f"{what} field {key!r} must be a non-empty string")
    return value
