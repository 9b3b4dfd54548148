"""Shared builders for the test suite: worlds, random stores, random frames."""

from __future__ import annotations

import random
import string
from datetime import datetime, timedelta, timezone
from typing import Optional

from tourbot.bridge import BridgeMessage
from tourbot.config import AppConfig
from tourbot.model import Pose2D, SimClock, TourRun, new_id
from tourbot.store import TourStore
from tourbot.world import World

BASE_TIME = datetime(2026, 8, 14, 12, 0, 0, tzinfo=timezone.utc)


def make_clock() -> SimClock:
    return SimClock(base=BASE_TIME)


def make_world(store: Optional[TourStore] = None, **kwargs) -> World:
    """A world on a simulated clock; tests drive it by calling step()."""
    kwargs.setdefault("cfg", AppConfig(store_path="/nonexistent/never-written.json"))
    return World(clock=make_clock(), store=store, **kwargs)


def drive(world: World, seconds: float) -> None:
    for _ in range(int(round(seconds / world.cfg.sim.tick))):
        world.step()


# -- random domain content ----------------------------------------------------

_WORDS = (
    "atrium", "gallery", "walkway", "enclosure", "habitat", "exhibit",
    "annex", "pavilion", "garden", "overlook", "archway", "vestibule",
)


def _name(rng: random.Random, prefix: str, index: int) -> str:
    word = rng.choice(_WORDS)
    accent = rng.choice(["", " é", " ß", ""])
    return f"{prefix} {word} {index}{accent}"


def _sentence(rng: random.Random, max_words: int = 8) -> str:
    count = rng.randrange(0, max_words + 1)
    return " ".join(rng.choice(_WORDS) for _ in range(count))


def random_pose(rng: random.Random, radius: float = 10.0) -> Pose2D:
    return Pose2D(
        rng.uniform(-radius, radius),
        rng.uniform(-radius, radius),
        rng.uniform(-3.2, 3.2),
    )


def random_store(rng: random.Random) -> TourStore:
    """A structurally valid store with random content, runs included."""
    clock = SimClock(base=BASE_TIME - timedelta(days=400))
    store = TourStore(clock=clock)
    for i in range(rng.randrange(0, 7)):
        store.add_location(_name(rng, "loc", i), random_pose(rng), _sentence(rng))
        clock.advance(rng.randrange(0, 4000))
    location_ids = list(store.locations)
    if location_ids:
        for i in range(rng.randrange(0, 5)):
            stops = [rng.choice(location_ids) for _ in range(rng.randrange(1, 5))]
            store.create_tour(
                _name(rng, "tour", i),
                rng.choice(["lab", "exhibition", "demo", ""]),
                stops,
                expected_duration=rng.randrange(1, 90),
            )
            clock.advance(rng.randrange(0, 4000))
    tour_ids = list(store.tours) or [new_id()]
    for _ in range(rng.randrange(0, 20)):
        started = BASE_TIME - timedelta(
            days=rng.randrange(0, 360), hours=rng.randrange(0, 24), seconds=rng.randrange(0, 3600)
        )
        store.append_run(
            TourRun(
                run_id=new_id(),
                tour_id=rng.choice(tour_ids),
                started_at=started,
                ended_at=started + timedelta(seconds=rng.randrange(0, 3000)),
                outcome=rng.choice(["completed", "completed", "aborted", "failed"]),
                stops_visited=rng.randrange(0, 6),
            )
        )
    return store


# -- random wire frames ---------------------------------------------------------

_TOKEN_CHARS = string.ascii_letters + string.digits + "/_-."


def _token(rng: random.Random) -> str:
    return "".join(rng.choice(_TOKEN_CHARS) for _ in range(rng.randrange(1, 12)))


def random_payload(rng: random.Random, depth: int = 0):
    pick = rng.randrange(0, 8 if depth < 2 else 6)
    if pick == 0:
        return None
    if pick == 1:
        return rng.choice([True, False])
    if pick == 2:
        return rng.randrange(-10**6, 10**6)
    if pick == 3:
        return round(rng.uniform(-1e6, 1e6), 6)
    if pick in (4, 5):
        return rng.choice(["", "ok", "héllo", "日本語", _token(rng)])
    if pick == 6:
        return [random_payload(rng, depth + 1) for _ in range(rng.randrange(0, 4))]
    return {_token(rng): random_payload(rng, depth + 1) for _ in range(rng.randrange(0, 4))}


def random_message(rng: random.Random) -> BridgeMessage:
    """A random valid frame of any op."""
    op = rng.choice(
        ["advertise_service", "call_service", "service_response", "subscribe", "unsubscribe", "publish", "status"]
    )
    if op == "advertise_service":
        return BridgeMessage(op=op, service="/" + _token(rng))
    if op == "call_service":
        args = random_payload(rng) if rng.random() < 0.7 else None
        return BridgeMessage(op=op, id=_token(rng), service="/" + _token(rng), args=args)
    if op == "service_response":
        values = random_payload(rng) if rng.random() < 0.7 else None
        return BridgeMessage(
            op=op,
            id=_token(rng),
            service="/" + _token(rng),
            result=rng.choice([True, False]),
            values=values,
        )
    if op in ("subscribe", "unsubscribe"):
        return BridgeMessage(op=op, topic="/" + _token(rng))
    if op == "publish":
        msg = random_payload(rng) if rng.random() < 0.8 else None
        return BridgeMessage(op=op, topic="/" + _token(rng), msg=msg)
    fields = {}
    if rng.random() < 0.5:
        fields["id"] = _token(rng)
    if rng.random() < 0.8:
        fields["msg"] = random_payload(rng)
    return BridgeMessage(op="status", **fields)
