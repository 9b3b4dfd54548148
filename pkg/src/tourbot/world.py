"""Wires simulator, store, executor, and router into one running system.

The world owns the single coarse lock that serializes ticks against service
calls, and the optional background thread that drives real-time ticking.
Tests and the CLI instead call step() directly against a simulated clock, so
a full tour runs in milliseconds of wall time.
"""

from __future__ import annotations

import threading
from typing import Callable, Optional

from .bridge import Router
from .config import AppConfig
from .executor import DEFAULT_TIMEOUT_FACTOR, TourExecutor
from .model import SimClock, WallClock
from .sim import Simulator
from .store import TourStore, canonical_json, load_store, write_store_text

POSE_TOPIC = "/robot/pose"


class World:
    """One robot, one tour library, one service router."""

    def __init__(
        self,
        cfg: Optional[AppConfig] = None,
        clock=None,
        store: Optional[TourStore] = None,
        router: Optional[Router] = None,
        autosave: bool = False,
        on_event: Optional[Callable[[str, int], None]] = None,
        timeout_factor: float = DEFAULT_TIMEOUT_FACTOR,
    ):
        self.cfg = cfg or AppConfig()
        self.clock = clock or WallClock()
        self.lock = threading.RLock()
        self.router = router or Router()
        self.store = store if store is not None else TourStore(clock=self.clock)
        self.store.clock = self.clock
        self.autosave = autosave
        self.sim = Simulator(
            self.cfg.sim,
            self.clock,
            publish_pose=lambda msg: self.router.publish(POSE_TOPIC, msg),
        )
        self.executor = TourExecutor(
            self.sim,
            self.store,
            publish=self.router.publish,
            on_event=on_event,
            timeout_factor=timeout_factor,
            lock=self.lock,
        )
        self._saved_revision = self.store.revision
        self._save_lock = threading.Lock()
        self._ticker: Optional[threading.Thread] = None
        self._stop = threading.Event()

        from .services import register_services

        register_services(self)

    # -- stepping -----------------------------------------------------------

    def step(self) -> None:
        """One simulation tick plus one executor transition."""
        with self.lock:
            self.sim.step()
            self.executor.on_tick()
            if isinstance(self.clock, SimClock):
                self.clock.advance(self.cfg.sim.tick)
        self.autosave_if_due()

    def run_until_idle(self, max_sim_seconds: float = 10_000.0) -> None:
        """Step until no tour is running or the simulated-time cap is hit."""
        deadline = self.sim.time_s + max_sim_seconds
        while self.executor.is_running() and self.sim.time_s < deadline:
            self.step()

    # -- persistence ----------------------------------------------------------

    def save(self) -> None:
        """Write the store to disk; safe to call from any thread.

        Snapshot under the world lock (cheap, in memory), write under a
        dedicated save lock (slow, disk) so two threads never race the same
        temp file and ticking never stalls on IO.
        """
        with self._save_lock:
            with self.lock:
                text = canonical_json(self.store)
                revision = self.store.revision
            write_store_text(text, self.cfg.store_path)
            self._saved_revision = revision

    def autosave_if_due(self) -> None:
        """Persist when enabled and the store changed; cheap no-op otherwise."""
        if self.autosave and self.store.revision != self._saved_revision:
            self.save()

    # -- background ticking -----------------------------------------------------

    def start_ticking(self) -> None:
        """Drive steps at tick/time_scale wall seconds each, in a daemon thread."""
        if self._ticker is not None:
            return
        interval = self.cfg.sim.tick / self.cfg.time_scale
        self._stop.clear()

        def loop():
            while not self._stop.wait(interval):
                self.step()

        self._ticker = threading.Thread(target=loop, name="tourbot-tick", daemon=True)
        self._ticker.start()

    def stop_ticking(self) -> None:
        if self._ticker is None:
            return
        self._stop.set()
        self._ticker.join(timeout=5.0)
        self._ticker = None


def world_from_store_path(cfg: AppConfig, clock=None, **kwargs) -> World:
    """Build a world around the store file at cfg.store_path, if it exists."""
    from pathlib import Path

    store = None
    if Path(cfg.store_path).exists():
        store = load_store(cfg.store_path, clock=clock)
    return World(cfg=cfg, clock=clock, store=store, **kwargs)
