"""Tour library: saved locations, tours, run history, and the tour file format.

The persisted form is a single versioned JSON document (schema_version 1) with
``locations``, ``tours`` and ``runs`` in a canonical order, so exporting the
same store twice yields identical bytes and tour files diff cleanly under
version control. Saves go through a temporary file and an atomic rename.

Mutations are serialized on an internal lock; reads hand out snapshots of
immutable value objects.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Any, Iterable, Optional

from .errors import ConflictError, NotFoundError, StoreFormatError, ValidationError
from .model import Location, Pose2D, Tour, TourRun, TourStop, WallClock, new_id

SCHEMA_VERSION = 1

_TOUR_PATCH_FIELDS = ("name", "tour_type", "stops", "expected_duration")
_LOCATION_PATCH_FIELDS = ("name", "description", "pose")


class UnsupportedVersionError(StoreFormatError):
    """The tour file declares a schema this build does not understand."""


def _by_name(items: Iterable) -> list:
    return sorted(items, key=lambda item: (item.name.lower(), item.name, item.id))


def _check_patch_keys(patch: Any, allowed: tuple, kind: str) -> None:
    if not isinstance(patch, dict):
        raise ValidationError(f"{kind} patch must be an object")
    unknown = sorted(set(patch) - set(allowed))
    if unknown:
        raise ValidationError(
            f"unknown {kind} field(s): {', '.join(unknown)}",
            detail={"unknown": unknown, "allowed": list(allowed)},
        )


class TourStore:
    """In-memory tour library with one-writer-at-a-time semantics."""

    def __init__(self, clock=None):
        self.clock = clock or WallClock()
        self._lock = threading.RLock()
        self.locations: dict[str, Location] = {}
        self.tours: dict[str, Tour] = {}
        self.runs: list[TourRun] = []
        self.revision = 0  # bumped on every mutation; drives autosave

    # -- locations ----------------------------------------------------------

    def add_location(self, name: str, pose: Pose2D, description: str = "") -> Location:
        if not isinstance(name, str) or not name.strip():
            raise ValidationError("location name must be a non-empty string")
        name = name.strip()
        with self._lock:
            self._check_name_free(self.locations.values(), name, "location")
            location = Location(
                id=new_id(),
                name=name,
                pose=pose,
                description=description,
                created_at=self.clock.now(),
            )
            self.locations[location.id] = location
            self.revision += 1
            return location

    def get_location(self, location_id: str) -> Location:
        with self._lock:
            location = self.locations.get(location_id)
        if location is None:
            raise NotFoundError(f"no such location: {location_id}")
        return location

    def list_locations(self) -> list[Location]:
        with self._lock:
            return _by_name(self.locations.values())

    def edit_location(self, location_id: str, patch: dict) -> Location:
        _check_patch_keys(patch, _LOCATION_PATCH_FIELDS, "location")
        with self._lock:
            current = self.get_location(location_id)
            name = current.name
            if "name" in patch:
                if not isinstance(patch["name"], str) or not patch["name"].strip():
                    raise ValidationError("location name must be a non-empty string")
                name = patch["name"].strip()
                if name.lower() != current.name.lower():
                    self._check_name_free(self.locations.values(), name, "location")
            pose = Pose2D.from_json(patch["pose"]) if "pose" in patch else current.pose
            updated = Location(
                id=current.id,
                name=name,
                pose=pose,
                description=patch.get("description", current.description),
                created_at=current.created_at,
            )
            self.locations[location_id] = updated
            self.revision += 1
            return updated

    def delete_location(self, location_id: str) -> None:
        with self._lock:
            location = self.get_location(location_id)
            referencing = _by_name(
                tour
                for tour in self.tours.values()
                if any(stop.location_id == location_id for stop in tour.stops)
            )
            if referencing:
                names = ", ".join(t.name for t in referencing)
                raise ConflictError(
                    f"location {location.name!r} is referenced by tours: {names}",
                    detail={"referenced_by": [{"id": t.id, "name": t.name} for t in referencing]},
                )
            del self.locations[location_id]
            self.revision += 1

    # -- tours ----------------------------------------------------------------

    def create_tour(
        self, name: str, tour_type: str, stop_location_ids: list, expected_duration: int
    ) -> Tour:
        if not isinstance(name, str) or not name.strip():
            raise ValidationError("tour name must be a non-empty string")
        if not isinstance(tour_type, str):
            raise ValidationError("tour_type must be a string")
        stops = _stops_from_ids(stop_location_ids)
        with self._lock:
            self._check_name_free(self.tours.values(), name.strip(), "tour")
            self._check_stops_resolve(stops)
            now = self.clock.now()
            tour = Tour(
                id=new_id(),
                name=name.strip(),
                tour_type=tour_type,
                stops=stops,
                expected_duration=expected_duration,
                created_at=now,
                updated_at=now,
            )
            self.tours[tour.id] = tour
            self.revision += 1
            return tour

    def get_tour(self, tour_id: str) -> Tour:
        with self._lock:
            tour = self.tours.get(tour_id)
        if tour is None:
            raise NotFoundError(f"no such tour: {tour_id}")
        return tour

    def find_tour_by_name(self, name: str) -> Tour:
        wanted = name.strip().lower()
        with self._lock:
            for tour in self.tours.values():
                if tour.name.lower() == wanted:
                    return tour
        raise NotFoundError(f"no such tour: {name}")

    def list_tours(self) -> list[Tour]:
        with self._lock:
            return _by_name(self.tours.values())

    def edit_tour(self, tour_id: str, patch: dict) -> Tour:
        _check_patch_keys(patch, _TOUR_PATCH_FIELDS, "tour")
        with self._lock:
            current = self.get_tour(tour_id)
            name = current.name
            if "name" in patch:
                if not isinstance(patch["name"], str) or not patch["name"].strip():
                    raise ValidationError("tour name must be a non-empty string")
                name = patch["name"].strip()
                if name.lower() != current.name.lower():
                    self._check_name_free(self.tours.values(), name, "tour")
            stops = current.stops
            if "stops" in patch:
                stops = _stops_from_patch(patch["stops"])
                self._check_stops_resolve(stops)
            now = self.clock.now()
            updated = Tour(
                id=current.id,
                name=name,
                tour_type=patch.get("tour_type", current.tour_type),
                stops=stops,
                expected_duration=patch.get("expected_duration", current.expected_duration),
                created_at=current.created_at,
                updated_at=max(now, current.created_at),
            )
            self.tours[tour_id] = updated
            self.revision += 1
            return updated

    def copy_tour(self, tour_id: str, new_name: Optional[str] = None) -> Tour:
        with self._lock:
            source = self.get_tour(tour_id)
            name = (new_name or f"{source.name} (copy)").strip()
            if not name:
                raise ValidationError("tour name must be a non-empty string")
            self._check_name_free(self.tours.values(), name, "tour")
            now = self.clock.now()
            copy = Tour(
                id=new_id(),
                name=name,
                tour_type=source.tour_type,
                stops=tuple(TourStop(s.location_id, s.speech_override) for s in source.stops),
                expected_duration=source.expected_duration,
                created_at=now,
                updated_at=now,
            )
            self.tours[copy.id] = copy
            self.revision += 1
            return copy

    def delete_tour(self, tour_id: str) -> None:
        with self._lock:
            self.get_tour(tour_id)
            del self.tours[tour_id]
            self.revision += 1

    # -- search, runs ---------------------------------------------------------

    def search(self, query: str) -> dict:
        """Case-insensitive substring match on names, both collections."""
        if not isinstance(query, str):
            raise ValidationError("search query must be a string")
        needle = query.strip().lower()
        with self._lock:
            tours = [t for t in _by_name(self.tours.values()) if needle in t.name.lower()]
            locations = [l for l in _by_name(self.locations.values()) if needle in l.name.lower()]
        return {"tours": tours, "locations": locations}

    def append_run(self, run: TourRun) -> None:
        with self._lock:
            self.runs.append(run)
            self.revision += 1

    def runs_snapshot(self) -> list[TourRun]:
        with self._lock:
            return list(self.runs)

    def resolve_stops(self, tour: Tour) -> list[tuple[TourStop, Location]]:
        """Resolve every stop to its location; fails naming the first missing id."""
        with self._lock:
            resolved = []
            for stop in tour.stops:
                location = self.locations.get(stop.location_id)
                if location is None:
                    raise ValidationError(
                        f"tour {tour.name!r} references missing location {stop.location_id!r}",
                        detail={"location_id": stop.location_id},
                    )
                resolved.append((stop, location))
            if not resolved:
                raise ValidationError(f"tour {tour.name!r} has no stops")
            return resolved

    # -- persistence ----------------------------------------------------------

    def to_payload(self) -> dict:
        """Canonical JSON-ready form: stable field order, stable sorting."""
        with self._lock:
            return {
                "schema_version": SCHEMA_VERSION,
                "locations": [l.to_json() for l in sorted(self.locations.values(), key=lambda l: l.id)],
                "tours": [t.to_json() for t in sorted(self.tours.values(), key=lambda t: t.id)],
                "runs": [
                    r.to_json()
                    for r in sorted(self.runs, key=lambda r: (r.started_at, r.run_id))
                ],
            }

    # -- internals --------------------------------------------------------------

    def _check_name_free(self, items: Iterable, name: str, what: str) -> None:
        lowered = name.lower()
        for item in items:
            if item.name.lower() == lowered:
                raise ConflictError(
                    f"{what} name {name!r} already in use by {item.name!r}",
                    detail={"id": item.id, "name": item.name},
                )

    def _check_stops_resolve(self, stops: tuple[TourStop, ...]) -> None:
        for stop in stops:
            if stop.location_id not in self.locations:
                raise ValidationError(
                    f"unknown location id {stop.location_id!r}",
                    detail={"location_id": stop.location_id},
                )


def _stops_from_ids(stop_location_ids: Any) -> tuple[TourStop, ...]:
    if not isinstance(stop_location_ids, (list, tuple)) or not stop_location_ids:
        raise ValidationError("stop_location_ids must be a non-empty list")
    stops = []
    for entry in stop_location_ids:
        if not isinstance(entry, str) or not entry:
            raise ValidationError("stop_location_ids entries must be location id strings")
        stops.append(TourStop(location_id=entry))
    return tuple(stops)


def _stops_from_patch(raw: Any) -> tuple[TourStop, ...]:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("stops must be a non-empty list")
    stops = []
    for entry in raw:
        if isinstance(entry, TourStop):
            stops.append(entry)
        elif isinstance(entry, str):
            stops.append(TourStop(location_id=entry))
        elif isinstance(entry, dict):
            stops.append(TourStop.from_json(entry))
        else:
            raise ValidationError("each stop must be a location id or a stop object")
    return tuple(stops)


def canonical_json(store: TourStore) -> str:
    """Byte-deterministic text form of a store."""
    return json.dumps(store.to_payload(), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_store_text(text: str, path) -> None:
    """Atomically put already-serialized store text at path (temp file + rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def save_store(store: TourStore, path) -> None:
    """Persist atomically: write a sibling temp file, then rename over the target."""
    write_store_text(canonical_json(store), path)


def store_from_payload(data: Any, clock=None) -> TourStore:
    if not isinstance(data, dict):
        raise StoreFormatError("tour file must contain a JSON object")
    version = data.get("schema_version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise UnsupportedVersionError(f"missing or invalid schema_version: {version!r}")
    if version != SCHEMA_VERSION:
        raise UnsupportedVersionError(
            f"unsupported schema_version {version} (this build supports {SCHEMA_VERSION})"
        )
    store = TourStore(clock=clock)
    for key in ("locations", "tours", "runs"):
        if not isinstance(data.get(key, []), list):
            raise StoreFormatError(f"tour file field {key!r} must be a list")
    try:
        for raw in data.get("locations", []):
            location = Location.from_json(raw)
            if location.id in store.locations:
                raise StoreFormatError(f"duplicate location id {location.id!r}")
            store._check_name_free(store.locations.values(), location.name, "location")
            store.locations[location.id] = location
        for raw in data.get("tours", []):
            tour = Tour.from_json(raw)
            if tour.id in store.tours:
                raise StoreFormatError(f"duplicate tour id {tour.id!r}")
            store._check_name_free(store.tours.values(), tour.name, "tour")
            store.tours[tour.id] = tour
        for raw in data.get("runs", []):
            store.runs.append(TourRun.from_json(raw))
    except (ValidationError, ConflictError) as exc:
        raise StoreFormatError(f"invalid tour file: {exc.message}", detail=exc.detail) from exc
    return store


def loads_store(text: str, clock=None) -> TourStore:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StoreFormatError(
            f"tour file is not valid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return store_from_payload(data, clock=clock)


def load_store(path, clock=None) -> TourStore:
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"tour file not found: {path}")
    return loads_store(path.read_text(encoding="utf-8"), clock=clock)
