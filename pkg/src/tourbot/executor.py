"""Tour execution: drives the robot stop-by-stop and speaks at each arrival.

The engine is a small state machine advanced once per simulator tick:

    navigating -> speaking -> advancing -> navigating ... -> done
    any phase  -> aborted          (operator abort)
    navigating -> failed           (no convergence within the time budget)

Each run appends exactly one TourRun to the store, whatever the outcome.
Progress is published on topic "/tour/progress" at every phase change.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Optional

from .errors import BusyError, NotFoundError
from .model import Location, RobotMode, TourRun, TourStop, new_id
from .sim import Simulator, estimate_travel_time
from .store import TourStore

PROGRESS_TOPIC = "/tour/progress"

# Multiple of the kinematic travel-time estimate after which navigation to a
# stop is declared failed. Generous: the simulator normally converges well
# under 1.5x the estimate.
DEFAULT_TIMEOUT_FACTOR = 3.0


class Phase(str, Enum):
    NAVIGATING = "navigating"
    SPEAKING = "speaking"
    ADVANCING = "advancing"
    DONE = "done"
    ABORTED = "aborted"
    FAILED = "failed"


TERMINAL_PHASES = (Phase.DONE, Phase.ABORTED, Phase.FAILED)

# phase at termination -> run outcome
_OUTCOMES = {Phase.DONE: "completed", Phase.ABORTED: "aborted", Phase.FAILED: "failed"}


@dataclass
class ExecutionState:
    """Where a running tour currently is."""

    tour_id: str
    stop_index: int
    phase: Phase
    run_id: str

    def to_json(self) -> dict:
        return {
            "tour_id": self.tour_id,
            "stop_index": self.stop_index,
            "phase": self.phase.value,
            "run_id": self.run_id,
        }


class TourExecutor:
    """Runs at most one tour at a time against a Simulator and a TourStore."""

    def __init__(
        self,
        sim: Simulator,
        store: TourStore,
        publish: Optional[Callable[[str, Any], Any]] = None,
        on_event: Optional[Callable[[str, int], Any]] = None,
        timeout_factor: float = DEFAULT_TIMEOUT_FACTOR,
        lock: Optional[threading.RLock] = None,
    ):
        self.sim = sim
        self.store = store
        self.timeout_factor = timeout_factor
        self._publish = publish or (lambda topic, msg: None)
        self.on_event = on_event or (lambda name, index: None)
        self._lock = lock or threading.RLock()
        self._state: Optional[ExecutionState] = None
        self._stops: list[tuple[TourStop, Location]] = []
        self._started_at = None
        self._stops_completed = 0
        self._nav_deadline = 0.0
        self._event_logs: dict[str, list[tuple[str, int]]] = {}
        self.last_run: Optional[TourRun] = None

    # -- queries ------------------------------------------------------------

    @property
    def state(self) -> Optional[ExecutionState]:
        with self._lock:
            return self._state

    def is_running(self) -> bool:
        return self.state is not None

    def events(self, run_id: str) -> list[tuple[str, int]]:
        """The arrive/speak log of a current or past run, in emission order."""
        with self._lock:
            return list(self._event_logs.get(run_id, []))

    # -- commands -----------------------------------------------------------

    def execute(self, tour_id: str) -> str:
        """Start a tour; returns the new run id. The run advances on ticks."""
        with self._lock:
            if self._state is not None:
                raise BusyError(
                    "tour already running", detail={"run_id": self._state.run_id}
                )
            tour = self.store.get_tour(tour_id)
            stops = self.store.resolve_stops(tour)
            if self.sim.status.mode != RobotMode.IDLE:
                raise BusyError(f"robot busy {self.sim.status.mode.value}")
            run_id = new_id()
            self._state = ExecutionState(
                tour_id=tour.id, stop_index=0, phase=Phase.NAVIGATING, run_id=run_id
            )
            self._stops = stops
            self._started_at = self.store.clock.now()
            self._stops_completed = 0
            self._event_logs[run_id] = []
            self.sim.set_active_tour(tour.id)
            self._start_navigation()
            self._publish_progress()
            return run_id

    def abort(self) -> TourRun:
        """Stop the running tour; records the run with outcome aborted."""
        with self._lock:
            if self._state is None:
                raise NotFoundError("no tour running")
            self.sim.cancel_goal()
            self.sim.cancel_speech()
            self._state.phase = Phase.ABORTED
            return self._finish()

    def on_tick(self) -> None:
        """Advance the state machine; call once after every simulator step."""
        with self._lock:
            state = self._state
            if state is None:
                return
            if state.phase == Phase.NAVIGATING:
                self._tick_navigating(state)
            elif state.phase == Phase.SPEAKING:
                self._tick_speaking(state)
            elif state.phase == Phase.ADVANCING:
                state.stop_index += 1
                state.phase = Phase.NAVIGATING
                self._start_navigation()
                self._publish_progress()

    # -- transitions ----------------------------------------------------------

    def _tick_navigating(self, state: ExecutionState) -> None:
        if self.sim.status.mode == RobotMode.IDLE:
            # Arrived. Speak the stop's text (possibly silence) and log events.
            stop, location = self._stops[state.stop_index]
            text = stop.speech_override if stop.speech_override is not None else location.description
            self._log_event("arrive", state.stop_index)
            self.sim.speak(text)
            state.phase = Phase.SPEAKING
            self._publish_progress()
            return
        if self.sim.time_s > self._nav_deadline + self.sim.cfg.tick:
            self.sim.cancel_goal()
            state.phase = Phase.FAILED
            self._finish()

    def _tick_speaking(self, state: ExecutionState) -> None:
        if self.sim.status.mode == RobotMode.SPEAKING:
            return
        # Speech over; the stop counts as completed.
        self._log_event("speak", state.stop_index)
        self._stops_completed += 1
        if state.stop_index + 1 >= len(self._stops):
            state.phase = Phase.DONE
            self._finish()
        else:
            state.phase = Phase.ADVANCING
            self._publish_progress()

    def _start_navigation(self) -> None:
        _, location = self._stops[self._state.stop_index]
        budget = estimate_travel_time(self.sim.status.pose, location.pose, self.sim.cfg)
        self._nav_deadline = self.sim.time_s + budget * self.timeout_factor
        self.sim.set_goal(location.pose)

    def _finish(self) -> TourRun:
        state = self._state
        self._publish_progress()
        run = TourRun(
            run_id=state.run_id,
            tour_id=state.tour_id,
            started_at=self._started_at,
            ended_at=self.store.clock.now(),
            outcome=_OUTCOMES[state.phase],
            stops_visited=self._stops_completed,
        )
        self.store.append_run(run)
        self.sim.set_active_tour(None)
        self.last_run = run
        self._state = None
        self._stops = []
        return run

    def _log_event(self, name: str, stop_index: int) -> None:
        self._event_logs[self._state.run_id].append((name, stop_index))
        self.on_event(name, stop_index)

    def _publish_progress(self) -> None:
        state = self._state
        self._publish(
            PROGRESS_TOPIC,
            {
                "run_id": state.run_id,
                "tour_id": state.tour_id,
                "stop_index": state.stop_index,
                "phase": state.phase.value,
            },
        )
