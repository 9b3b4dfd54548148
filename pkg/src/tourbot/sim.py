"""Deterministic kinematic stand-in for the guide robot.

Navigation uses a rotate-then-translate unicycle policy: within one tick the
robot first turns toward the goal bearing (bounded by ``omega_max * tick``),
and only once aligned does it advance straight (bounded by ``v_max * tick``);
on reaching the goal position it turns in place to the goal heading. Arrival
is checked at the start of a tick, so a 1 m straight drive at the default
limits goes idle on the 20th tick (2.0 s) and a pure quarter turn on the 16th
(1.6 s).

Speech is timed, not synthesized: the adapter maps text to a whole number of
seconds at a configured word rate, standing in for a real TTS engine behind
the same interface. The simulated clock is owned by the caller and advances
one tick per step, so tests and the headless runner execute much faster than
real time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Callable, Optional, Protocol

from .errors import BusyError, ValidationError
from .model import Pose2D, RobotMode, RobotStatus, normalize_angle

TELEOP_DIRECTIONS = ("forward", "back", "rotate_left", "rotate_right")


@dataclass(frozen=True)
class SimConfig:
    """Motion and speech limits; all rates are per simulated second."""

    v_max: float = 0.5          # m/s
    omega_max: float = 1.0      # rad/s
    tick: float = 0.1           # s
    arrive_dist: float = 0.05   # m
    arrive_angle: float = 0.1   # rad
    speech_rate: float = 2.5    # words/s

    def __post_init__(self):
        for name in ("v_max", "omega_max", "tick", "arrive_dist", "arrive_angle", "speech_rate"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValidationError(f"sim config {name} must be a number")
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(f"sim config {name} must be strictly positive")
        if self.tick > 1.0:
            raise ValidationError("sim config tick must be at most 1.0 s")

    def to_json(self) -> dict:
        return {
            "v_max": self.v_max,
            "omega_max": self.omega_max,
            "tick": self.tick,
            "arrive_dist": self.arrive_dist,
            "arrive_angle": self.arrive_angle,
            "speech_rate": self.speech_rate,
        }


@dataclass(frozen=True)
class SpeechEvent:
    """One speech playback: what was said, when, and for how long."""

    text: str
    started_at: datetime
    duration: int  # whole seconds

    def __post_init__(self):
        if self.text.split() and self.duration < 1:
            raise ValidationError("speech duration must be at least 1 s for non-empty text")
        if self.duration < 0:
            raise ValidationError("speech duration must be non-negative")

    def to_json(self) -> dict:
        from .model import to_timestamp

        return {
            "text": self.text,
            "started_at": to_timestamp(self.started_at),
            "duration": self.duration,
        }


class SpeechSynth(Protocol):
    def duration_seconds(self, text: str) -> int: ...


class WordRateSpeech:
    """Timing-only speech backend: whole seconds from a words-per-second rate."""

    def __init__(self, rate: float):
        if rate <= 0:
            raise ValidationError("speech rate must be positive")
        self.rate = rate

    def duration_seconds(self, text: str) -> int:
        words = len(text.split())
        if words == 0:
            return 0
        return max(1, math.ceil(round(words / self.rate, 9)))


def tick(status: RobotStatus, cfg: SimConfig) -> RobotStatus:
    """Advance one tick of the navigation policy; idle/speaking poses stay put."""
    if status.mode != RobotMode.NAVIGATING:
        return status
    pose, goal = status.pose, status.goal
    dist = pose.distance_to(goal)
    max_turn = cfg.omega_max * cfg.tick

    if dist <= cfg.arrive_dist:
        err = normalize_angle(goal.theta - pose.theta)
        if abs(err) <= cfg.arrive_angle:
            return status.with_(mode=RobotMode.IDLE, goal=None)
        step = err if abs(err) <= max_turn else math.copysign(max_turn, err)
        return status.with_(pose=Pose2D(pose.x, pose.y, pose.theta + step))

    bearing = math.atan2(goal.y - pose.y, goal.x - pose.x)
    err = normalize_angle(bearing - pose.theta)
    if abs(err) > max_turn:
        return status.with_(pose=Pose2D(pose.x, pose.y, pose.theta + math.copysign(max_turn, err)))
    advance = min(dist, cfg.v_max * cfg.tick)
    return status.with_(
        pose=Pose2D(pose.x + advance * math.cos(bearing), pose.y + advance * math.sin(bearing), bearing)
    )


def estimate_travel_time(start: Pose2D, goal: Pose2D, cfg: SimConfig) -> float:
    """Closed-form seconds for turn-to-bearing, straight drive, turn-to-heading."""
    dist = start.distance_to(goal)
    if dist > 1e-12:
        bearing = math.atan2(goal.y - start.y, goal.x - start.x)
        turn = abs(normalize_angle(bearing - start.theta))
        final = abs(normalize_angle(goal.theta - bearing))
    else:
        dist = 0.0
        turn = 0.0
        final = abs(normalize_angle(goal.theta - start.theta))
    return turn / cfg.omega_max + dist / cfg.v_max + final / cfg.omega_max


class Simulator:
    """Owns robot state; commands apply between ticks via the world lock."""

    def __init__(
        self,
        cfg: SimConfig,
        clock,
        publish_pose: Optional[Callable[[dict], Any]] = None,
        speech: Optional[SpeechSynth] = None,
    ):
        self.cfg = cfg
        self.clock = clock
        self._publish = publish_pose or (lambda msg: None)
        self._speech = speech or WordRateSpeech(cfg.speech_rate)
        self._status = RobotStatus()
        self._tick_count = 0
        self._speech_until: Optional[float] = None

    @property
    def status(self) -> RobotStatus:
        return self._status

    @property
    def time_s(self) -> float:
        """Simulated seconds elapsed. Exact: tick count times tick length."""
        return self._tick_count * self.cfg.tick

    def set_pose(self, pose: Pose2D) -> None:
        """Teleport; only sensible while idle (initial placement, tests)."""
        if self._status.mode != RobotMode.IDLE:
            raise BusyError(f"busy {self._status.mode.value}")
        self._status = self._status.with_(pose=pose)

    def set_active_tour(self, tour_id: Optional[str]) -> None:
        self._status = self._status.with_(active_tour=tour_id)

    def set_goal(self, pose: Pose2D) -> RobotStatus:
        """Start navigating to ``pose``; a previous goal is superseded."""
        if self._status.mode == RobotMode.SPEAKING:
            raise BusyError("busy speaking")
        self._status = self._status.with_(mode=RobotMode.NAVIGATING, goal=pose)
        return self._status

    def cancel_goal(self) -> None:
        if self._status.mode == RobotMode.NAVIGATING:
            self._status = self._status.with_(mode=RobotMode.IDLE, goal=None)

    def cancel_speech(self) -> None:
        if self._status.mode == RobotMode.SPEAKING:
            self._status = self._status.with_(mode=RobotMode.IDLE)
            self._speech_until = None

    def speak(self, text: str) -> SpeechEvent:
        """Speak ``text`` for its timed duration; empty text is a no-op."""
        if self._status.mode == RobotMode.NAVIGATING:
            raise BusyError("busy navigating")
        if self._status.mode == RobotMode.SPEAKING:
            raise BusyError("busy speaking")
        if not isinstance(text, str):
            raise ValidationError("speech text must be a string")
        duration = self._speech.duration_seconds(text)
        event = SpeechEvent(text=text, started_at=self.clock.now(), duration=duration)
        if duration > 0:
            self._status = self._status.with_(mode=RobotMode.SPEAKING)
            self._speech_until = self.time_s + duration
        return event

    def teleop(self, direction: str) -> RobotStatus:
        """One manual step: translate or rotate by a single tick's budget."""
        if direction not in TELEOP_DIRECTIONS:
            raise ValidationError(
                f"direction must be one of {', '.join(TELEOP_DIRECTIONS)}", detail={"got": direction}
            )
        if self._status.mode != RobotMode.IDLE:
            raise BusyError(f"busy {self._status.mode.value}")
        pose = self._status.pose
        step = self.cfg.v_max * self.cfg.tick
        turn = self.cfg.omega_max * self.cfg.tick
        if direction == "forward":
            pose = Pose2D(pose.x + step * math.cos(pose.theta), pose.y + step * math.sin(pose.theta), pose.theta)
        elif direction == "back":
            pose = Pose2D(pose.x - step * math.cos(pose.theta), pose.y - step * math.sin(pose.theta), pose.theta)
        elif direction == "rotate_left":
            pose = Pose2D(pose.x, pose.y, pose.theta + turn)
        else:
            pose = Pose2D(pose.x, pose.y, pose.theta - turn)
        self._status = self._status.with_(pose=pose)
        return self._status

    def step(self) -> RobotStatus:
        """Advance one tick: run the motion policy, finish due speech, publish pose."""
        if self._status.mode == RobotMode.NAVIGATING:
            self._status = tick(self._status, self.cfg)
        self._tick_count += 1
        # Speech ends the moment simulated time reaches its duration.
        if self._status.mode == RobotMode.SPEAKING and self._speech_until is not None:
            if self.time_s + 1e-9 >= self._speech_until:
                self._status = self._status.with_(mode=RobotMode.IDLE)
                self._speech_until = None
        self._publish(self._status.pose.to_json())
        return self._status
